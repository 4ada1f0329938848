#pragma once

#include <string_view>
#include <vector>

#include "wpdiag/homeo.hpp"

namespace wpdiag {

// Real literal with optional sign and pi factors: "0.5", "-pi/3", "2pi/5", "3*pi/4", "1e-3".
// Throws InvalidSpec.
double parse_real(std::string_view text);
// Comma-separated parse_real values.
std::vector<double> parse_real_list(std::string_view text);

// Homeomorphism mini-language:
//   rot:c                     rotation by c
//   trig:a                    x + a sin(2x)
//   mobius:a,b,c,d            (a t + b) / (c t + d)
//   mobius:P=p,Q=q,R=r        t -> P / (Q - t) - R
//   pwl:b;s1,...,sn           n equal pieces of [b, b + pi]; empty b means pi (sqrt 2 - 1)
//   pwl:b1,...,bn;s1,...,sn   pieces starting at the breakpoints
//   samples:x1,...;y1,...     linear interpolation of one period
//   compose:f|g|...           f o g o ...
// Throws InvalidSpec for malformed text; constructors may throw NotMonotone.
CircleHomeo parse_homeo(std::string_view spec);

}  // namespace wpdiag
