#pragma once

// Envelope constants, measured by tools/calibrate (seed 0) and frozen at
// 1.1x the observed value; counts are kept exact. Regenerate with
//   build/tools/calibrate > include/ouvar/calibration.hpp
namespace ouvar::calibration {

inline constexpr double kSlack = 1.1;

// Decay rate c fixed in the large-time derivative envelope.
inline constexpr double kLargeTimeDecay = 0.25;

// sup_{t<=1} e^{-R(x)} K_t(x,u) (1 - eta) / (1 + |x|)
// observed 0.9700218973
inline constexpr double kGlobalKernelSup = 1.068;

// |dK/dt| e^{-R(x)} / (exp(-c (e^{-t}u - x)^2) (e^{-t}|u| + e^{-2t})), t >= 1
// observed 1.189008496
inline constexpr double kLargeTimeDerivative = 1.308;

// max_j |(1 + x_j)^2 - 4j|
// observed 1.99999748
inline constexpr double kTelescope = 2.2;

// max_j |x_j - (2 sqrt(j) - 1)| sqrt(j)
// observed 0.4999987449
inline constexpr double kAsymptotic = 0.55;

// maximal overlap of the enlarged intervals
// observed 6
inline constexpr int kOverlap = 6;

// sup_t F_+-(t) / (s + 1)
// observed 0.9124588817
inline constexpr double kFSup = 1.004;

// v(3) of F_+- over (0, T] / (s + 1)
// observed 0.908590969
inline constexpr double kFVariation = 0.9995;

// monotone segments of F_+- on (0, T]
// observed 6
inline constexpr int kSegments = 6;

// sup_alpha alpha gamma{V > alpha}, unit masses
// observed 0.9646616199
inline constexpr double kWeakType = 1.062;

// sup_{alpha in [2, 1e4]} alpha sqrt(log alpha) gamma, t >= 1
// observed 0.3495456891
inline constexpr double kLargeTime = 0.3846;

// local weak-type constant, Lebesgue measure
// observed 1.587781983
inline constexpr double kLocalWeakType = 1.747;

}  // namespace ouvar::calibration
