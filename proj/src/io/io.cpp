#include "tdheston/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "tdheston/errors.hpp"

namespace tdh::io {
namespace {

using nlohmann::json;

json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(what + ": invalid JSON: " + e.what());
    }
}

double number(const json& j, const char* key, const std::string& what) {
    if (!j.contains(key)) throw InputError(what + ": missing \"" + key + "\"");
    const json& v = j.at(key);
    if (!v.is_number()) throw InputError(what + ": \"" + key + "\" must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw InputError(what + ": \"" + key + "\" must be finite");
    return x;
}

void pair(const json& j, const char* key, double& c1, double& c2, const std::string& what) {
    if (!j.contains(key)) throw InputError(what + ": missing \"" + key + "\"");
    const json& v = j.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw InputError(what + ": \"" + key + "\" must be [slope, level]");
    c1 = v[0].get<double>();
    c2 = v[1].get<double>();
    if (!std::isfinite(c1) || !std::isfinite(c2)) throw InputError(what + ": \"" + key + "\" must be finite");
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double to_double(const std::string& s, int line_no, const std::string& what) {
    std::size_t pos = 0;
    double x = 0.0;
    try {
        x = std::stod(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (s.empty() || pos != s.size() || !std::isfinite(x)) {
        std::ostringstream msg;
        msg << what << ": line " << line_no << ": '" << s << "' is not a finite number";
        throw InputError(msg.str());
    }
    return x;
}

// Rows of a CSV with a header; columns are looked up by name.
struct Table {
    std::map<std::string, std::size_t> col;
    std::vector<std::vector<std::string>> rows;
    std::vector<int> line_no;
};

Table parse_table(const std::string& text, const std::vector<std::string>& required, const std::string& what) {
    Table t;
    std::istringstream in(text);
    std::string line;
    int n = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
        auto cells = split(line);
        if (!header) {
            for (std::size_t k = 0; k < cells.size(); ++k) t.col[cells[k]] = k;
            for (const auto& r : required)
                if (!t.col.count(r)) throw InputError(what + ": header lacks column '" + r + "'");
            header = true;
            continue;
        }
        if (cells.size() != t.col.size()) {
            std::ostringstream msg;
            msg << what << ": line " << n << ": expected " << t.col.size() << " fields, got " << cells.size();
            throw InputError(msg.str());
        }
        t.rows.push_back(std::move(cells));
        t.line_no.push_back(n);
    }
    if (!header) throw InputError(what + ": empty file");
    return t;
}

}  // namespace

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ParamsFile parse_params(const std::string& text) {
    const std::string what = "params";
    const json j = parse_json(text, what);
    if (!j.is_object()) throw InputError(what + ": top level must be an object");
    ParamsFile f;
    pair(j, "kappa", f.params.kappa1, f.params.kappa2, what);
    pair(j, "theta", f.params.theta1, f.params.theta2, what);
    pair(j, "eta", f.params.eta1, f.params.eta2, what);
    pair(j, "rho", f.params.rho1, f.params.rho2, what);
    if (j.contains("v0")) {
        f.v0 = number(j, "v0", what);
        f.has_v0 = true;
    }
    if (j.contains("T")) {
        f.maturity = number(j, "T", what);
        f.has_maturity = true;
    }
    return f;
}

ParamsFile read_params(const std::string& path) {
    try {
        return parse_params(read_file(path));
    } catch (const InputError& e) {
        throw InputError(std::string(e.what()) + " (" + path + ")");
    }
}

namespace {

// Keys in a fixed order with %.12g numbers, so output is byte-stable.
class Obj {
public:
    Obj& num(const std::string& k, double v) { return raw(k, fmt(v)); }
    Obj& pair(const std::string& k, double a, double b) { return raw(k, "[" + fmt(a) + ", " + fmt(b) + "]"); }
    Obj& str(const std::string& k, const std::string& v) { return raw(k, json(v).dump()); }
    Obj& boolean(const std::string& k, bool v) { return raw(k, v ? "true" : "false"); }
    Obj& raw(const std::string& k, const std::string& v) {
        items_.push_back("  \"" + k + "\": " + v);
        return *this;
    }
    std::string str() const {
        std::string s = "{\n";
        for (std::size_t i = 0; i < items_.size(); ++i) s += items_[i] + (i + 1 < items_.size() ? ",\n" : "\n");
        return s + "}\n";
    }

private:
    std::vector<std::string> items_;
};

Obj params_obj(const LinearParams& p) {
    Obj o;
    o.pair("kappa", p.kappa1, p.kappa2)
        .pair("theta", p.theta1, p.theta2)
        .pair("eta", p.eta1, p.eta2)
        .pair("rho", p.rho1, p.rho2);
    return o;
}

}  // namespace

std::string params_json(const LinearParams& p, double v0, double maturity) {
    Obj o = params_obj(p);
    o.num("v0", v0).num("T", maturity);
    return o.str();
}

MarketFile parse_market(const std::string& text) {
    const std::string what = "market";
    const json j = parse_json(text, what);
    if (!j.is_object()) throw InputError(what + ": top level must be an object");
    MarketFile m;
    m.ctx.spot = number(j, "spot", what);
    m.ctx.rate = j.contains("rate") ? number(j, "rate", what) : 0.0;
    m.ctx.strike = j.contains("strike") ? number(j, "strike", what) : m.ctx.spot;
    if (j.contains("maturity")) {
        m.ctx.maturity = number(j, "maturity", what);
        m.has_maturity = true;
    }
    if (j.contains("v0")) {
        m.ctx.v0 = number(j, "v0", what);
        m.has_v0 = true;
    }
    return m;
}

MarketFile read_market(const std::string& path) {
    try {
        return parse_market(read_file(path));
    } catch (const InputError& e) {
        throw InputError(std::string(e.what()) + " (" + path + ")");
    }
}

std::string price_json(const MarketContext& ctx, const PriceResult& r, Route route) {
    Obj o;
    o.num("spot", ctx.spot)
        .num("strike", ctx.strike)
        .num("maturity", ctx.maturity)
        .num("rate", ctx.rate)
        .num("v0", ctx.v0)
        .str("route", to_string(route))
        .num("call", r.call)
        .num("put", r.put)
        .num("p1", r.p1)
        .num("p2", r.p2)
        .num("quad_error_estimate", r.quad_error_estimate)
        .num("omega_max", r.omega_max)
        .boolean("cap_reached", r.cap_reached)
        .boolean("fallback_used", r.fallback_used);
    return o.str();
}

std::string calib_json(const CalibResult& r, double maturity) {
    Obj o = params_obj(r.params);
    o.num("v0", r.v0)
        .num("T", maturity)
        .num("objective", r.objective)
        .num("rmse", r.rmse)
        .raw("iterations", std::to_string(r.iterations))
        .raw("evaluations", std::to_string(r.evaluations))
        .boolean("converged", r.converged);
    return o.str();
}

std::vector<Quote> parse_quotes_csv(const std::string& text) {
    const std::string what = "quotes";
    const Table t = parse_table(text, {"strike", "maturity", "price"}, what);
    const bool has_w = t.col.count("weight") > 0;
    std::vector<Quote> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const int n = t.line_no[r];
        Quote q;
        q.strike = to_double(row[t.col.at("strike")], n, what);
        q.maturity = to_double(row[t.col.at("maturity")], n, what);
        q.price = to_double(row[t.col.at("price")], n, what);
        q.weight = has_w ? to_double(row[t.col.at("weight")], n, what) : 1.0;
        out.push_back(q);
    }
    return out;
}

std::vector<Quote> read_quotes(const std::string& path) {
    try {
        return parse_quotes_csv(read_file(path));
    } catch (const InputError& e) {
        throw InputError(std::string(e.what()) + " (" + path + ")");
    }
}

std::string quotes_csv(const std::vector<Quote>& q) {
    std::string s = "strike,maturity,price,weight\n";
    for (const Quote& x : q) s += fmt(x.strike) + "," + fmt(x.maturity) + "," + fmt(x.price) + "," + fmt(x.weight) + "\n";
    return s;
}

std::string smile_csv(const std::vector<SmilePoint>& pts) {
    std::string s = "strike,maturity,call,put,implied_vol\n";
    for (const SmilePoint& p : pts)
        s += fmt(p.strike) + "," + fmt(p.maturity) + "," + fmt(p.call) + "," + fmt(p.put) + "," +
             fmt(p.implied_vol) + "\n";
    return s;
}

std::vector<SmilePoint> parse_smile_csv(const std::string& text) {
    const std::string what = "smile";
    const Table t = parse_table(text, {"strike", "maturity", "call", "put", "implied_vol"}, what);
    std::vector<SmilePoint> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const int n = t.line_no[r];
        out.push_back({to_double(row[t.col.at("strike")], n, what), to_double(row[t.col.at("maturity")], n, what),
                       to_double(row[t.col.at("call")], n, what), to_double(row[t.col.at("put")], n, what),
                       to_double(row[t.col.at("implied_vol")], n, what)});
    }
    return out;
}

void write_paths_header(std::ostream& out) { out << "path_id,t,S,V\n"; }

void write_path_rows(std::ostream& out, const PathSample& p) {
    for (std::size_t k = 0; k < p.times.size(); ++k)
        out << p.path_id << ',' << fmt(p.times[k]) << ',' << fmt(p.s[k]) << ',' << fmt(p.v[k]) << '\n';
}

std::vector<PathSample> parse_paths_csv(const std::string& text) {
    const std::string what = "paths";
    const Table t = parse_table(text, {"path_id", "t", "S", "V"}, what);
    std::vector<PathSample> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const int n = t.line_no[r];
        const double id = to_double(row[t.col.at("path_id")], n, what);
        if (id < 0 || id != std::floor(id)) throw InputError(what + ": path_id must be a non-negative integer");
        const auto pid = static_cast<std::uint64_t>(id);
        if (out.empty() || out.back().path_id != pid) {
            out.emplace_back();
            out.back().path_id = pid;
        }
        out.back().times.push_back(to_double(row[t.col.at("t")], n, what));
        out.back().s.push_back(to_double(row[t.col.at("S")], n, what));
        out.back().v.push_back(to_double(row[t.col.at("V")], n, what));
    }
    return out;
}

}  // namespace tdh::io
