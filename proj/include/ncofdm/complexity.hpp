#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace ncofdm {

enum class Scheme { NcOfdm, TdNcOfdm };

std::string scheme_name(Scheme s);

/// Real multiplications and additions per OFDM symbol, excluding the IDFT
/// shared by both schemes.
struct OpCount {
    Scheme scheme = Scheme::NcOfdm;
    int K = 0;
    int N = 0;
    int V = 0;
    std::int64_t real_mults = 0;
    std::int64_t real_adds = 0;
};

/// Projection precoder (dense K x K complex product):
///   mults 8K^2, adds 8K^2 - 2K.
/// Time-domain smoother:
///   mults 4(V+1)N + 8VK + 4(V+1)(2V+1),
///   adds  4(V+1)N + 8VK + 2(2V+1)^2.
/// Throws ConfigError unless K, N > 0 and V >= 0.
OpCount closed_form_counts(Scheme scheme, int K, int N, int V);

struct ComplexityRatio {
    double mults = 0.0;
    double adds = 0.0;
};

/// Time-domain count divided by the precoder count, per operation class.
ComplexityRatio complexity_ratio(int K, int N, int V);

/// "scheme,K,N,V,mults,adds,ratio" header plus one row.
void write_complexity_csv_header(std::ostream& os);
void write_complexity_csv_row(std::ostream& os, const OpCount& c, double ratio);

}  // namespace ncofdm
