// Versatility of a few catalog models, with the forms that decided each value.

#include <cstdio>

#include "versatility/versatility.hpp"

int main() {
  for (const char* id : {"exponential", "gamma", "weibull:lambda=1", "negbinom", "poisson"}) {
    try {
      const auto r = versatility::versatility_final(id);
      std::printf("%-18s V = %.6g  (%s)\n", id, r.value, std::string(to_string(r.method)).c_str());
      for (const auto& p : r.per_parameterization)
        std::printf("    %-10s %2zu symbols  V = %.6g\n", p.label.c_str(), p.symbols, p.value);
    } catch (const versatility::Error& e) {
      std::printf("%-18s %s\n", id, e.what());
    }
  }
  return 0;
}
