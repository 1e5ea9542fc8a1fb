#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "volalab/panel.hpp"
#include "volalab/series.hpp"

namespace testutil {

// Unique scratch directory, removed on destruction.
class TempDir {
  public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        for (int i = 0; i < 10000; ++i) {
            auto candidate = base / ("volalab_test_" + std::to_string(counter_++));
            if (std::filesystem::create_directory(candidate)) {
                path_ = candidate;
                return;
            }
        }
        throw std::runtime_error("cannot create temp dir");
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

  private:
    static inline int counter_ = 0;
    std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// n consecutive business days starting at `start`.
inline std::vector<volalab::Date> business_days(volalab::Date start, int n) {
    std::vector<volalab::Date> out;
    volalab::Date d = volalab::add_business_days(start, 0);
    for (int i = 0; i < n; ++i) {
        out.push_back(d);
        d = volalab::add_business_days(d, 1);
    }
    return out;
}

// Minimal panel with the given y values and zero factor columns.
inline volalab::ReturnPanel make_panel(const std::vector<double>& y, int lag_order = 0,
                                       volalab::Date start = volalab::Date(2002, 1, 7)) {
    volalab::DataTable t;
    t.dates = business_days(start, static_cast<int>(y.size()));
    t.add_column("y", y);
    const std::vector<double> zeros(y.size(), 0.0);
    t.add_column("rf", zeros);
    t.add_column("mkt_rf", zeros);
    t.add_column("smb", zeros);
    t.add_column("hml", zeros);
    t.add_column("umd", zeros);
    return volalab::build_panel(t, lag_order);
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> out(n);
    for (auto& v : out) v = dist(rng);
    return out;
}

}  // namespace testutil
