#pragma once

#include <string>

#include "potgames/games.hpp"
#include "potgames/potential.hpp"

namespace potgames {

/// Final-potential specifiers:
///   expfinal                        e^R
///   polyfinal:coeffs=c0,c1,...      sum of c_i R^i, rejected unless
///                                   strictly positive on the default grid
///   table:<path>                    CSV of R,value pairs, validated
///                                   monotone and convex, interpolated
///                                   linearly
FinalPotential parse_final_spec(const std::string& spec);

/// Potential specifiers:
///   exp:eta=<float>
///   normalhedge
///   gaussfinal:final=<final spec>,horizon=<float>[,order=<int>]
Potential parse_potential_spec(const std::string& spec);

/// Fixed adversary specifiers:
///   random-walk[:s=<float>]         fair +-s (default s = 1)
///   biased:s=<float>,p=<float>      +s w.p. p, -s otherwise
///   constant:l=<float>[,s=<float>]  same loss l at every atom
AdversaryMove parse_adversary_spec(const std::string& spec);

/// As above, plus `script:<path>` for a scripted-adversary CSV.
AdversaryFn parse_adversary(const std::string& spec);

LearnerKind parse_learner_spec(const std::string& spec);  // potential|uniform

}  // namespace potgames
