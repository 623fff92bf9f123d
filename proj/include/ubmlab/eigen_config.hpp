#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace ubmlab {

// One snapshot of the N eigenangles at diffusion time t. Angles are stored as
// unwrapped reals (winding-aware): theta_1 <= ... <= theta_N < theta_1 + 2*pi,
// strictly increasing once t > 0. Use principal() for the folded view.
class EigenAngleConfig {
public:
    EigenAngleConfig(double t, std::vector<double> angles);

    double t() const { return t_; }
    std::size_t size() const { return angles_.size(); }
    const std::vector<double>& angles() const { return angles_; }
    double angle(std::size_t i) const { return angles_[i]; }

    // Angles folded to (-pi, pi], re-sorted ascending.
    std::vector<double> principal() const;

    // Mean of the unwrapped angles (the center of mass).
    double mean_angle() const;

    // Number of angles with principal value in the half-open arc (a, b].
    std::size_t count_in_interval(double a, double b) const;

    void write_csv(std::ostream& os) const;

private:
    double t_;
    std::vector<double> angles_;
};

// CSV with header `t,index,angle`, one row per eigenvalue, 17 significant
// digits. A file may concatenate several configs (blocks share a t value).
void write_configs_csv(std::ostream& os, const std::vector<EigenAngleConfig>& configs);
std::vector<EigenAngleConfig> read_configs_csv(std::istream& is);
std::vector<EigenAngleConfig> read_configs_csv_file(const std::string& path);

} // namespace ubmlab
