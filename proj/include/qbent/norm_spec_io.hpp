#pragma once

#include <string>
#include <string_view>

#include "qbent/gnorm.hpp"

namespace qbent {

// Text form: whitespace-separated key=value pairs.
//   family=lp p=0.5 dim=3
//   family=sup dim=3
//   family=lorentz p=1 r=inf dim=4 [gamma=0.25]
//   family=phi gamma=0.5 [dim=2]        family=omega gamma=0.5 [dim=2]
//   family=theta gamma=0.5 inner=(family=lp p=2 dim=3)
//   family=tau outer=(family=omega gamma=0.5) factors=[(family=sup dim=1),(family=lp p=1 dim=2)]
// dim is optional wherever it is implied by the other fields.
NormSpec parse_norm_spec(std::string_view text);
std::string format_norm_spec(const NormSpec& spec);

// Shortest decimal that round-trips; "inf" for infinity.
std::string format_real(double x);
double parse_real(std::string_view s);

}  // namespace qbent
