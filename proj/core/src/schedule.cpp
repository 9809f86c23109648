#include "svx/schedule.hpp"

#include <cmath>

#include "svx/errors.hpp"

namespace svx {

void ScheduleParams::validate() const {
    if (!(t1 < t2)) throw ParamError("schedule requires t1 < t2");
    if (!(alpha_f >= 0.0) || !std::isfinite(alpha_f)) throw ParamError("alpha_f must be >= 0");
    if (n_t < 1) throw ParamError("n_t must be >= 1");
    if (labelled < 0 || unlabelled < 0) throw ParamError("patient counts must be >= 0");
    if (refresh_period < 1) throw ParamError("refresh_period must be >= 1");
}

double alpha(int epoch, const ScheduleParams& p) {
    p.validate();
    if (epoch < 0) throw ParamError("epoch must be >= 0");
    if (epoch < p.t1) return 0.0;
    if (epoch < p.t2) return static_cast<double>(epoch - p.t1) / static_cast<double>(p.t2 - p.t1) * p.alpha_f;
    return p.alpha_f;
}

int pseudo_batches(int epoch, const ScheduleParams& p) {
    const double a = alpha(epoch, p);
    return static_cast<int>(std::floor(p.n_t * a / (a + 1.0) + 0.5));
}

std::vector<int> refresh_epochs(int total_epochs, const ScheduleParams& p) {
    p.validate();
    if (total_epochs < p.refresh_period) throw ParamError("total_epochs must be >= refresh_period");
    std::vector<int> out;
    for (int e = p.refresh_period; e < total_epochs; e += p.refresh_period) out.push_back(e);
    return out;
}

}  // namespace svx
