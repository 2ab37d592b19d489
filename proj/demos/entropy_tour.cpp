// Entropic quantities on a handful of small states.

#include <cstdio>

#include "redbound/redbound.hpp"

using namespace redbound;

int main() {
  const Indices a{0}, b{1}, c{2};
  const DensityMatrix bell = bell_state();
  std::printf("Bell: S(AB) %.4f  I_c(A>B) %.4f  I(A:B) %.4f\n", von_neumann(bell), coherent_info(bell, a, b),
              mutual_info(bell, a, b));

  const DensityMatrix ups = upsilon_state(2);
  std::printf("Upsilon d=2: S %.4f  I_c %.4f\n", von_neumann(ups), coherent_info(ups));

  Rng rng(7);
  const DensityMatrix psi = random_pure({2, 3, 2}, rng);
  std::printf("random pure 2x3x2: I_c(A>B) + 2S(B') - I_c(A>BB') = %.4f\n", coherent_info_gap(psi, a, b, c));

  Ensemble e{{0.5, 0.5}, {pure_state({1.0, 0.0}, {2}), pure_state({0.0, 1.0}, {2})}};
  std::printf("orthogonal bit ensemble: chi %.4f\n", holevo(e));

  const DensityMatrix rho = random_state({2, 2, 2}, 3, rng, {"A", "B", "E"});
  std::printf("random ABE, computational measurement: I(X:B) - I(X:E) = %.4f\n",
              devetak_winter(measure_to_cqq(rho, computational_povm(2))));
  return 0;
}
