#include "ubmlab/eigen_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ubmlab/io.hpp"
#include "ubmlab/polar.hpp"

namespace ubmlab {

EigenAngleConfig::EigenAngleConfig(double t, std::vector<double> angles)
    : t_(t), angles_(std::move(angles)) {
    if (angles_.empty()) throw std::invalid_argument("EigenAngleConfig: N >= 1 required");
    if (!(t_ >= 0.0)) throw std::invalid_argument("EigenAngleConfig: t >= 0 required");
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t i = 1; i < angles_.size(); ++i) {
        if (t_ > 0.0 ? !(angles_[i] > angles_[i - 1]) : !(angles_[i] >= angles_[i - 1]))
            throw std::invalid_argument("EigenAngleConfig: angles must be ordered");
    }
    if (angles_.size() > 1 && !(angles_.back() < angles_.front() + two_pi))
        throw std::invalid_argument("EigenAngleConfig: window wider than one turn");
}

std::vector<double> EigenAngleConfig::principal() const {
    std::vector<double> out(angles_.size());
    std::transform(angles_.begin(), angles_.end(), out.begin(), principal_angle);
    std::sort(out.begin(), out.end());
    return out;
}

double EigenAngleConfig::mean_angle() const {
    return std::accumulate(angles_.begin(), angles_.end(), 0.0) /
           static_cast<double>(angles_.size());
}

std::size_t EigenAngleConfig::count_in_interval(double a, double b) const {
    if (!(b >= a)) throw std::invalid_argument("count_in_interval: need a <= b");
    auto folded = principal();
    auto count_le = [&](double x) {
        return static_cast<std::size_t>(
            std::upper_bound(folded.begin(), folded.end(), x) - folded.begin());
    };
    const double pi = std::numbers::pi;
    if (b - a >= 2.0 * pi) return folded.size();
    double fa = principal_angle(a), fb = principal_angle(b);
    if (fa == fb && a != b) return folded.size();  // full circle after folding
    if (fa <= fb) return count_le(fb) - count_le(fa);
    // wrapped arc (fa, pi] u (-pi, fb]
    return folded.size() - count_le(fa) + count_le(fb);
}

void EigenAngleConfig::write_csv(std::ostream& os) const {
    os << "t,index,angle\n";
    for (std::size_t i = 0; i < angles_.size(); ++i)
        os << io::fmt17(t_) << ',' << (i + 1) << ',' << io::fmt17(angles_[i]) << '\n';
}

void write_configs_csv(std::ostream& os, const std::vector<EigenAngleConfig>& configs) {
    os << "t,index,angle\n";
    for (const auto& c : configs)
        for (std::size_t i = 0; i < c.size(); ++i)
            os << io::fmt17(c.t()) << ',' << (i + 1) << ',' << io::fmt17(c.angle(i)) << '\n';
}

std::vector<EigenAngleConfig> read_configs_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("config csv: empty file");
    if (line != "t,index,angle" && line != "t,index,angle\r")
        throw std::runtime_error("config csv: unexpected header '" + line + "'");
    std::vector<EigenAngleConfig> out;
    bool have_block = false;
    double block_t = 0.0;
    std::vector<double> block;
    auto flush = [&] {
        if (have_block) out.emplace_back(block_t, block);
        block.clear();
    };
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string tf, idx, ang;
        if (!std::getline(row, tf, ',') || !std::getline(row, idx, ',') || !std::getline(row, ang))
            throw std::runtime_error("config csv: malformed row '" + line + "'");
        double t = std::stod(tf);
        std::size_t index = static_cast<std::size_t>(std::stoull(idx));
        if (index == 1) {
            flush();
            have_block = true;
            block_t = t;
        } else if (!have_block || t != block_t || index != block.size() + 1) {
            throw std::runtime_error("config csv: out-of-order row '" + line + "'");
        }
        block.push_back(std::stod(ang));
    }
    flush();
    return out;
}

std::vector<EigenAngleConfig> read_configs_csv_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("config csv: cannot open " + path);
    return read_configs_csv(is);
}

} // namespace ubmlab
