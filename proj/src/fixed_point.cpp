#include "rlops/fixed_point.hpp"

#include "rlops/csv.hpp"

namespace rlops {

std::string residuals_to_csv(const std::vector<double>& residual_history) {
    std::string out = "iteration,residual\n";
    for (std::size_t i = 0; i < residual_history.size(); ++i) {
        out += std::to_string(i + 1);
        out += ',';
        out += format_double(residual_history[i]);
        out += '\n';
    }
    return out;
}

} // namespace rlops
