// Walks through one (h, c) value per stratum and prints the pieces of its fiber.
//
//   fiber_tour [k]

#include <cstdio>
#include <cstdlib>
#include <vector>

#include "mbloch/mbloch.hpp"

using namespace mbloch;

int main(int argc, char** argv) {
  const double k = argc > 1 ? std::atof(argv[1]) : -1.0;
  const SystemParams params(k);

  const std::vector<ECValue> tour = {{0.5 * k, 1.0},  {0.5 * k, -1.0}, {0.0, 0.5}, {0.0, 0.0},
                                     {0.5 * k - 1.0, 1.0}, {0.25 * k, 1.0}, {1.0, -1.0}};
  for (const ECValue& v : tour) {
    const Fiber f = build_fiber(params, v, 1e-12);
    std::printf("(h, c) = (%g, %g)  %s", v.h, v.c, to_string(f.stratum));
    if (f.M) std::printf("  M = %g", *f.M);
    std::printf("\n");
    for (const auto& c : f.components) {
      double worst = 0.0;
      for (double t : c.sample_times(100)) {
        const State3 s = c.parametrize(t);
        worst = std::max({worst, std::abs(hamiltonian(params, s) - v.h), std::abs(casimir(s) - v.c)});
      }
      const State3 a = c.parametrize(c.window.lo);
      const State3 b = c.parametrize(c.window.hi);
      std::printf("  %-17s %-6s t in [%.4g, %.4g]  (%.3g, %.3g, %.3g) -> (%.3g, %.3g, %.3g)  res %.1e\n",
                  to_string(c.kind), c.sign_variant.c_str(), c.window.lo, c.window.hi, a.x(), a.y(),
                  a.z(), b.x(), b.y(), b.z(), worst);
    }
  }
  return 0;
}
