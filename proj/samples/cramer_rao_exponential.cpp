// Cramer-Rao bounds for the Exponential in its two printed forms.
//
// With rate lambda the information is 1/lambda^2, so one observation at
// lambda = 6 cannot pin the rate down below variance 36. In the mean form
// theta = 1/lambda the information is 1/theta^2 again, and the bound on the
// mean is 1/36.

#include <cstdio>

#include "versatility/versatility.hpp"

int main() {
  using namespace versatility;
  const Model& exp_model = model("exponential");

  const Parameterization& rate = exp_model.form("rate");
  const auto at_rate = rate.params({6.0});
  const auto crb_rate = cramer_rao_bound(rate.spec(), at_rate, 1);
  std::printf("rate form, lambda = 6:     I = %.6g, bound = %.6g\n", fisher_scalar(rate.spec(), at_rate),
              crb_rate.value);

  const Parameterization& mean = exp_model.form("mean");
  const auto at_mean = mean.params({1.0 / 6.0});
  const auto crb_mean = cramer_rao_bound(mean.spec(), at_mean, 1);
  std::printf("mean form, theta = 1/6:    I = %.6g, bound = %.6g\n", fisher_scalar(mean.spec(), at_mean),
              crb_mean.value);

  // n observations divide the bound by n.
  for (long long n : {10LL, 100LL, 1000LL})
    std::printf("rate form, n = %-5lld       bound = %.6g\n", n, cramer_rao_bound(rate.spec(), at_rate, n).value);
  return 0;
}
