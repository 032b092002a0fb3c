#pragma once

// File formats: parameter and market JSON, quote/smile/path CSV, result JSON.

#include <iosfwd>
#include <string>
#include <vector>

#include "tdheston/calib.hpp"
#include "tdheston/charfn.hpp"
#include "tdheston/mcsim.hpp"
#include "tdheston/pricer.hpp"

namespace tdh::io {

/// {"kappa": [k1, k2], "theta": [t1, t2], "eta": [e1, e2], "rho": [r1, r2], "v0": v, "T": t}
/// v0 and T are optional.
struct ParamsFile {
    LinearParams params;
    double v0 = 0.04;
    double maturity = 1.0;
    bool has_v0 = false;
    bool has_maturity = false;
};

ParamsFile parse_params(const std::string& json_text);
ParamsFile read_params(const std::string& path);
std::string params_json(const LinearParams& p, double v0, double maturity);

/// {"spot", "rate", "maturity", "strike", "v0"}; v0 and maturity fall back to
/// the params file when absent.
struct MarketFile {
    MarketContext ctx;
    bool has_v0 = false;
    bool has_maturity = false;
};

MarketFile parse_market(const std::string& json_text);
MarketFile read_market(const std::string& path);

/// Numbers as %.12g.
std::string fmt(double x);

std::string price_json(const MarketContext& ctx, const PriceResult& r, Route route);
std::string calib_json(const CalibResult& r, double maturity);

/// Quote CSV with header strike,maturity,price,weight (weight optional, default 1).
std::vector<Quote> parse_quotes_csv(const std::string& text);
std::vector<Quote> read_quotes(const std::string& path);
std::string quotes_csv(const std::vector<Quote>& q);

/// strike,maturity,call,put,implied_vol
std::string smile_csv(const std::vector<SmilePoint>& pts);
std::vector<SmilePoint> parse_smile_csv(const std::string& text);

/// path_id,t,S,V
void write_paths_header(std::ostream& out);
void write_path_rows(std::ostream& out, const PathSample& p);
std::vector<PathSample> parse_paths_csv(const std::string& text);

std::string read_file(const std::string& path);

}  // namespace tdh::io
