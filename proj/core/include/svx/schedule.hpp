#pragma once

#include <vector>

namespace svx {

/// Pseudo-label batch schedule of the semi-supervised training loop.
struct ScheduleParams {
    double alpha_f = 3.0;     ///< final weighting factor
    int t1 = 200;             ///< epoch at which pseudo-labelled batches start
    int t2 = 700;             ///< epoch at which the ramp reaches alpha_f
    int n_t = 250;            ///< total batches per epoch
    int labelled = 5;         ///< p1, labelled patients
    int unlabelled = 259;     ///< p2, unlabelled patients
    int refresh_period = 200; ///< epochs between pseudo-label recomputation

    void validate() const;
};

/// Weighting factor: 0 before t1, linear ramp to alpha_f on [t1, t2), alpha_f after.
double alpha(int epoch, const ScheduleParams& p);

/// round_half_up(n_t * alpha / (alpha + 1)).
int pseudo_batches(int epoch, const ScheduleParams& p);

/// Epochs at which pseudo-labels are recomputed: multiples of the refresh
/// period strictly below total_epochs.
std::vector<int> refresh_epochs(int total_epochs, const ScheduleParams& p);

}  // namespace svx
