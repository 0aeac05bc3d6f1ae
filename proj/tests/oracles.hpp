#pragma once

// Frozen outputs of the scripts in tests/oracles/. Regenerate with
//   python3 bessel_table.py
//   python3 discrete_levels.py 64        (and 16)
//   python3 discrete_levels.py p4 32
//   python3 toy_fiber.py
//   python3 bound_formulas.py

namespace oracle {

// j_{1,m}^2 + (k pi)^2 on the unit cylinder, six smallest.
inline constexpr double kBessel[6] = {24.551575043213,  54.160388246481,  59.088060722784,
                                      88.696873926052,  103.508410251928, 113.369058296226};

// Independent dense assembly, 8 x 8 cells.
inline constexpr double kEig8[6] = {24.146635336007, 51.893547505574, 55.885036923200,
                                    83.631949092766, 93.419736154721, 100.015347419527};
inline constexpr double kS4_8 = 24.406565860939;
inline constexpr double kC0p4_8 = 148.920114281088;
// Another local minimum of the same quotient, reached from the fourth eigenvector.
inline constexpr double kC0p4_8_local = 176.788674741;

// 32 x 32, p = 4, identical over seeds 0, 1, 2.
inline constexpr double kS4_32 = 25.360567351314;
inline constexpr double kC0p4_32 = 160.789594095128;

// p = 6 quotient minimum over 10 whitened random starts (L-BFGS).
inline constexpr double kS6_16 = 12.779537320663;
inline constexpr double kS6_64 = 12.773215244603;

// Grid search of the quartic toy.
inline constexpr double kToyLevel = 0.25;

// upper with p = 6, lambda + lambda_nu = 1, mu = pi; lower with p = 6, S = 1.
inline constexpr double kUpperExample = 1.0471975511965979;
inline constexpr double kLowerExample = 0.3333333333333334;

}  // namespace oracle
