#include "ncofdm/complexity.hpp"

#include <cstdio>
#include <ostream>

#include "ncofdm/config.hpp"

namespace ncofdm {

std::string scheme_name(Scheme s)
{
    return s == Scheme::NcOfdm ? "nc-ofdm" : "td-nc-ofdm";
}

OpCount closed_form_counts(Scheme scheme, int K, int N, int V)
{
    if (K <= 0 || N <= 0 || V < 0)
        throw ConfigError("closed_form_counts: need K > 0, N > 0, V >= 0");
    const std::int64_t k = K, n = N, v = V;
    OpCount c{scheme, K, N, V, 0, 0};
    if (scheme == Scheme::NcOfdm) {
        c.real_mults = 8 * k * k;
        c.real_adds = 8 * k * k - 2 * k;
    } else {
        c.real_mults = 4 * (v + 1) * n + 8 * v * k + 4 * (v + 1) * (2 * v + 1);
        c.real_adds = 4 * (v + 1) * n + 8 * v * k + 2 * (2 * v + 1) * (2 * v + 1);
    }
    return c;
}

ComplexityRatio complexity_ratio(int K, int N, int V)
{
    const OpCount nc = closed_form_counts(Scheme::NcOfdm, K, N, V);
    const OpCount td = closed_form_counts(Scheme::TdNcOfdm, K, N, V);
    return {static_cast<double>(td.real_mults) / static_cast<double>(nc.real_mults),
            static_cast<double>(td.real_adds) / static_cast<double>(nc.real_adds)};
}

void write_complexity_csv_header(std::ostream& os)
{
    os << "scheme,K,N,V,mults,adds,ratio\n";
}

void write_complexity_csv_row(std::ostream& os, const OpCount& c, double ratio)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s,%d,%d,%d,%lld,%lld,%.6f\n", scheme_name(c.scheme).c_str(),
                  c.K, c.N, c.V, static_cast<long long>(c.real_mults),
                  static_cast<long long>(c.real_adds), ratio);
    os << buf;
}

}  // namespace ncofdm
