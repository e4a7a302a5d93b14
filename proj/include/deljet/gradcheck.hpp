#ifndef DELJET_GRADCHECK_HPP
#define DELJET_GRADCHECK_HPP

#include <string>
#include <vector>

#include "deljet/losses.hpp"

namespace deljet {

// Max relative error between analytic and central-difference gradients over
// every parameter: |a - n| / max(|a|, |n|, 1e-12).
double grad_check(Network& net, const Objective& obj, const Tensor& x, const Tensor& y,
                  double epsilon = 1e-5);

struct GradCheckCase {
    std::string name;
    double max_rel_error;
    bool passed;
};

// Fixed menu of small networks covering every layer type and both losses.
std::vector<GradCheckCase> grad_check_menu(std::uint64_t seed, double tolerance = 1e-4,
                                           double epsilon = 1e-5);

}  // namespace deljet

#endif
