#pragma once

#include "minet/mutual_info.hpp"
#include "minet/network.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

namespace test_support {

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::mt19937_64 rng(std::random_device{}());
        path_ = std::filesystem::temp_directory_path() / ("minet_" + tag + "_" + std::to_string(rng()));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline minet::MiMatrix matrix(std::size_t window, Eigen::MatrixXd w) {
    minet::MiMatrix m;
    m.window_index = window;
    m.weights = std::move(w);
    return m;
}

inline std::vector<double> random_series(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> v(n);
    double level = 100.0;
    for (auto& x : v) x = level += g(rng);
    return v;
}

}  // namespace test_support
