// Tomogram -> joint distribution -> averages and residuals for a few states.

#include <cstdio>

#include "jpr/jpr.hpp"

using namespace jpr;

int main() {
  const OscillatorParams pr{};
  const std::vector<Axis> axes{default_x_axis(), default_mu_axis(), default_nu_axis()};
  const GaussianPrior prior{};

  auto state = parse_state("coherent:re=1,im=0.5");
  auto J = make_joint(tomogram_exact(state, pr, Representation::symplectic, axes), prior);
  std::printf("%s  integral of joint = %.6f\n", to_string(state).c_str(), integrate_all(J.grid));

  for (const char* op : {"q", "p", "n"}) {
    cplx regular = pair(regular_symbol(op, prior, pr), J);
    cplx singular = pair(singular_symbol(op, prior, pr), J);
    std::printf("  <%s>  regular %.5f   singular %.5f\n", op, regular.real(), singular.real());
  }

  const auto V = PolynomialPotential::harmonic(pr);
  for (int n = 0; n <= 2; ++n) {
    auto F = make_joint(tomogram_exact(Fock{n}, pr, Representation::symplectic, axes), prior);
    const double E = n + 0.5;
    std::printf("fock:n=%d  stationary residual at E=%.1f: %.2e, at E=%.1f: %.2e\n", n, E,
                stationary_residual_symplectic(F, V, E).relative, E + 0.2,
                stationary_residual_symplectic(F, V, E + 0.2).relative);
  }

  const GaussianSumPrior optical{};
  auto w = make_joint(tomogram_exact(state, pr, Representation::optical, {default_x_axis(), default_theta_axis()}), optical);
  auto rhs = evolution_rhs_optical(w, V);
  auto oracle = coherent_time_derivative(cplx(1, 0.5), 0.0, optical, w.grid.axes(), pr);
  std::printf("optical evolution residual vs analytic trajectory: %.2e\n", residual_report("evolution", rhs, oracle).relative);
  return 0;
}
