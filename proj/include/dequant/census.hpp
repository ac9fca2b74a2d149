#pragma once

// Exact census of n-input Boolean functions: 2 constant, C(2^n, 2^(n-1))
// balanced, the rest invalid. Exact big-integer arithmetic (GMP), so the
// counts and the validity probability are never rounded.

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace dequant {

struct CensusReport {
  int n = 0;
  mpz_class n_constant;
  mpz_class n_balanced;
  mpz_class n_invalid;
  mpz_class n_total;   // 2^(2^n)
  mpq_class p_valid;   // (n_balanced + 2) / n_total
};

inline CensusReport function_census(int n) {
  if (n < 1 || n > 16) {
    throw std::invalid_argument("census supports 1 <= n <= 16, got " + std::to_string(n));
  }
  CensusReport report;
  report.n = n;
  unsigned long domain = 1ul << n;  // 2^n input strings

  report.n_constant = 2;
  mpz_bin_uiui(report.n_balanced.get_mpz_t(), domain, domain / 2);
  mpz_ui_pow_ui(report.n_total.get_mpz_t(), 2, domain);
  report.n_invalid = report.n_total - report.n_balanced - report.n_constant;

  report.p_valid = mpq_class(report.n_balanced + report.n_constant, report.n_total);
  report.p_valid.canonicalize();
  return report;
}

}  // namespace dequant
