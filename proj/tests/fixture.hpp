#pragma once

#include <complex>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

// Rows of fixtures/specfun.csv, written offline by tools/gen_fixtures.py.
struct FixtureRow {
    std::complex<double> a;
    double b;
    std::complex<double> z;
    std::complex<double> f;
    std::string which;
};

inline std::vector<FixtureRow> load_fixtures(const std::string& which) {
    std::ifstream in(std::string(TDH_FIXTURES) + "/specfun.csv");
    if (!in) throw std::runtime_error("fixture file missing");
    std::string line;
    std::getline(in, line);
    std::vector<FixtureRow> out;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string cell;
        std::vector<std::string> c;
        while (std::getline(ss, cell, ',')) c.push_back(cell);
        if (c.size() != 8 || c[7] != which) continue;
        out.push_back({{std::stod(c[0]), std::stod(c[1])},
                       std::stod(c[2]),
                       {std::stod(c[3]), std::stod(c[4])},
                       {std::stod(c[5]), std::stod(c[6])},
                       c[7]});
    }
    return out;
}
