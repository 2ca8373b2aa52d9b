#include "udm/numerics.hpp"
#include "udm/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace udm {

RootResult bisect(const std::function<double(double)>& f, double lo, double hi,
                  double abs_tol, int max_iter) {
    double flo = f(lo), fhi = f(hi);
    if (!std::isfinite(flo) || !std::isfinite(fhi))
        throw numerical_error("bisect: non-finite endpoint value");
    if (flo == 0.0) return {lo, 0.0, 0};
    if (fhi == 0.0) return {hi, 0.0, 0};
    if ((flo > 0) == (fhi > 0))
        throw numerical_error("bisect: endpoints do not bracket a root");
    int it = 0;
    double mid = 0.5 * (lo + hi), fmid = 0.0;
    for (; it < max_iter && (hi - lo) > abs_tol; ++it) {
        mid = 0.5 * (lo + hi);
        fmid = f(mid);
        if (fmid == 0.0) break;
        if ((fmid > 0) == (flo > 0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    mid = 0.5 * (lo + hi);
    return {mid, std::abs(f(mid)), it};
}

double golden_max(const std::function<double(double)>& f, double lo, double hi, int iters) {
    static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters && (b - a) > 1e-15 * (1.0 + std::abs(a)); ++i) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

double central_diff(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

void project_subsimplex(std::vector<double>& q) {
    double s = 0.0;
    for (auto& v : q) {
        if (v < 0.0) v = 0.0;
        s += v;
    }
    if (s <= 1.0) return;
    // project onto the simplex face {sum = 1}
    std::vector<double> u(q);
    std::sort(u.begin(), u.end(), std::greater<>());
    double css = 0.0, theta = 0.0;
    int k = 0;
    for (size_t i = 0; i < u.size(); ++i) {
        css += u[i];
        double t = (css - 1.0) / double(i + 1);
        if (u[i] - t > 0) {
            theta = t;
            k = int(i) + 1;
        }
    }
    assert(k > 0);
    (void)k;
    for (auto& v : q) v = std::max(v - theta, 0.0);
}

// xoshiro256++ with splitmix64 seeding; fixed algorithm keeps streams
// identical across platforms and standard libraries.
static inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

RandomStream::RandomStream(std::uint64_t seed) {
    std::uint64_t z = seed;
    for (auto& si : s_) {
        z += 0x9e3779b97f4a7c15ULL;
        std::uint64_t w = z;
        w = (w ^ (w >> 30)) * 0xbf58476d1ce4e5b9ULL;
        w = (w ^ (w >> 27)) * 0x94d049bb133111ebULL;
        si = w ^ (w >> 31);
    }
}

std::uint64_t RandomStream::next_u64() {
    std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double RandomStream::next_double() {
    return double(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::next_double(double lo, double hi) {
    return lo + (hi - lo) * next_double();
}

double irwin_hall_hinge(int d, double a) {
    assert(d >= 1);
    if (a <= 0.0) return 0.5 * d - a; // E[S] - a
    if (a >= d) return 0.0;
    // E[(S-a)+] = sum_k (-1)^k C(d,k) ((d-k)^{d+1} - ((a-k)+)^{d+1}) / (d+1)!
    //           - (d - a) * sum over the survival-side expansion; derived by
    // integrating the Irwin-Hall survival function: E[(S-a)+] = int_a^d P(S>s) ds.
    // P(S > s) = 1 - 1/d! sum_k (-1)^k C(d,k) (s-k)+^d.
    double total = 0.0;
    double dfact = 1.0;
    for (int i = 2; i <= d; ++i) dfact *= i;
    double binom = 1.0;
    for (int k = 0; k <= d; ++k) {
        double hi = std::max(double(d) - k, 0.0);
        double lo = std::max(a - k, 0.0);
        double term = (std::pow(hi, d + 1) - std::pow(lo, d + 1)) / double(d + 1);
        total += ((k % 2 == 0) ? 1.0 : -1.0) * binom * term;
        binom = binom * double(d - k) / double(k + 1);
    }
    double integral = (double(d) - a) - total / dfact;
    return std::max(integral, 0.0);
}

int thread_count() {
    if (const char* env = std::getenv("UDM_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : int(hc);
}

void parallel_for(int count, const std::function<void(int)>& fn) {
    int workers = std::min(thread_count(), count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace udm
