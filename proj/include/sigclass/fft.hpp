#ifndef SIGCLASS_FFT_HPP
#define SIGCLASS_FFT_HPP

// Complex FFT for arbitrary lengths.
//
// Lengths whose prime factors are all <= kMaxDirectRadix run through a
// recursive mixed-radix decimation-in-time transform. Anything else goes
// through Bluestein's chirp-z reformulation on a power-of-two inner
// transform, so every length is O(N log N).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace sigclass {

template <typename Scalar>
class Fft {
public:
    using Complex = std::complex<Scalar>;

    static constexpr std::size_t kMaxDirectRadix = 61;

    explicit Fft(std::size_t n) : n_(n) {
        if (n == 0) throw std::invalid_argument("Fft: length must be positive");
        factors_ = factorize(n);
        if (!factors_.empty() && factors_.back() > kMaxDirectRadix) {
            init_bluestein();
        } else {
            twiddles_ = make_twiddles(n);
            // Pairs of 2s become radix-4 passes.
            order_factors();
        }
    }

    std::size_t size() const { return n_; }

    /// out[k] = sum_j in[j] * exp(-2*pi*i*j*k/N). `in` and `out` must not alias.
    void forward(std::span<const Complex> in, std::span<Complex> out) const {
        if (in.size() != n_ || out.size() != n_)
            throw std::invalid_argument("Fft: buffer size mismatch");
        if (n_ == 1) {
            out[0] = in[0];
        } else if (bluestein_) {
            run_bluestein(in, out);
        } else {
            std::vector<Complex> scratch(factors_.empty() ? 1 : factors_.front());
            work(out.data(), in.data(), 1, 1, 0, n_, scratch);
        }
    }

    std::vector<Complex> forward(std::span<const Complex> in) const {
        std::vector<Complex> out(n_);
        forward(in, out);
        return out;
    }

    /// Transform of a real sequence.
    std::vector<Complex> forward_real(std::span<const Scalar> in) const {
        std::vector<Complex> buf(in.begin(), in.end());
        return forward(std::span<const Complex>(buf));
    }

    bool uses_bluestein() const { return static_cast<bool>(bluestein_); }

private:
    struct Bluestein {
        std::size_t m = 0;
        std::vector<Complex> chirp;      // exp(-i*pi*k^2/N), k < N
        std::vector<Complex> kernel_fft; // FFT of the conjugate chirp, wrapped to length m
        std::unique_ptr<Fft> inner;
    };

    static std::vector<std::size_t> factorize(std::size_t n) {
        std::vector<std::size_t> f;
        for (std::size_t p = 2; p * p <= n; ++p) {
            while (n % p == 0) {
                f.push_back(p);
                n /= p;
            }
        }
        if (n > 1) f.push_back(n);
        return f; // ascending
    }

    static std::vector<Complex> make_twiddles(std::size_t n) {
        std::vector<Complex> tw(n);
        const long double step = -2.0L * std::numbers::pi_v<long double> / static_cast<long double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            const long double a = step * static_cast<long double>(i);
            tw[i] = Complex(static_cast<Scalar>(std::cos(a)), static_cast<Scalar>(std::sin(a)));
        }
        return tw;
    }

    void order_factors() {
        std::vector<std::size_t> ordered;
        std::size_t twos = 0;
        for (auto p : factors_)
            if (p == 2) ++twos;
        for (auto it = factors_.rbegin(); it != factors_.rend(); ++it)
            if (*it != 2) ordered.push_back(*it);
        for (; twos >= 2; twos -= 2) ordered.push_back(4);
        if (twos == 1) ordered.push_back(2);
        factors_ = std::move(ordered);
        // Scratch is sized by the front radix, so put the largest there.
        std::size_t largest = 1;
        for (auto p : factors_) largest = std::max(largest, p);
        if (!factors_.empty()) {
            auto it = std::find(factors_.begin(), factors_.end(), largest);
            std::iter_swap(factors_.begin(), it);
        }
    }

    // Recursive DIT step: `n_stage` outputs from inputs spaced `stride` apart.
    void work(Complex* out, const Complex* in, std::size_t stride, std::size_t fstride,
              std::size_t level, std::size_t n_stage, std::vector<Complex>& scratch) const {
        const std::size_t p = factors_[level];
        const std::size_t m = n_stage / p;
        if (m == 1) {
            for (std::size_t j = 0; j < p; ++j) out[j] = in[j * stride];
        } else {
            for (std::size_t j = 0; j < p; ++j)
                work(out + j * m, in + j * stride, stride * p, fstride * p, level + 1, m, scratch);
        }
        switch (p) {
        case 2: butterfly2(out, fstride, m); break;
        case 4: butterfly4(out, fstride, m); break;
        default: butterfly_generic(out, fstride, p, m, scratch); break;
        }
    }

    void butterfly2(Complex* out, std::size_t fstride, std::size_t m) const {
        for (std::size_t u = 0; u < m; ++u) {
            const Complex t = out[u + m] * twiddles_[u * fstride];
            out[u + m] = out[u] - t;
            out[u] += t;
        }
    }

    void butterfly4(Complex* out, std::size_t fstride, std::size_t m) const {
        for (std::size_t u = 0; u < m; ++u) {
            const Complex a0 = out[u];
            const Complex a1 = out[u + m] * twiddles_[u * fstride];
            const Complex a2 = out[u + 2 * m] * twiddles_[2 * u * fstride];
            const Complex a3 = out[u + 3 * m] * twiddles_[3 * u * fstride];
            const Complex s02 = a0 + a2, d02 = a0 - a2;
            const Complex s13 = a1 + a3, d13 = a1 - a3;
            // -i * d13 for the forward transform
            const Complex rot(d13.imag(), -d13.real());
            out[u] = s02 + s13;
            out[u + m] = d02 + rot;
            out[u + 2 * m] = s02 - s13;
            out[u + 3 * m] = d02 - rot;
        }
    }

    void butterfly_generic(Complex* out, std::size_t fstride, std::size_t p, std::size_t m,
                           std::vector<Complex>& scratch) const {
        for (std::size_t u = 0; u < m; ++u) {
            for (std::size_t q = 0; q < p; ++q) scratch[q] = out[u + q * m];
            for (std::size_t q1 = 0; q1 < p; ++q1) {
                const std::size_t k = u + q1 * m;
                const std::size_t step = (k * fstride) % n_;
                std::size_t idx = 0;
                Complex acc = scratch[0];
                for (std::size_t q = 1; q < p; ++q) {
                    idx += step;
                    if (idx >= n_) idx -= n_;
                    acc += scratch[q] * twiddles_[idx];
                }
                out[k] = acc;
            }
        }
    }

    void init_bluestein() {
        auto b = std::make_unique<Bluestein>();
        std::size_t m = 1;
        while (m < 2 * n_ - 1) m <<= 1;
        b->m = m;
        b->inner = std::make_unique<Fft>(m);
        b->chirp.resize(n_);
        const std::uint64_t two_n = 2 * static_cast<std::uint64_t>(n_);
        for (std::size_t k = 0; k < n_; ++k) {
            // k^2 mod 2N keeps the angle small and exact.
            const std::uint64_t kk = (static_cast<std::uint64_t>(k) * k) % two_n;
            const long double a = -std::numbers::pi_v<long double> * static_cast<long double>(kk) /
                                  static_cast<long double>(n_);
            b->chirp[k] = Complex(static_cast<Scalar>(std::cos(a)), static_cast<Scalar>(std::sin(a)));
        }
        std::vector<Complex> kernel(m, Complex(0));
        kernel[0] = std::conj(b->chirp[0]);
        for (std::size_t k = 1; k < n_; ++k) {
            kernel[k] = std::conj(b->chirp[k]);
            kernel[m - k] = std::conj(b->chirp[k]);
        }
        b->kernel_fft = b->inner->forward(std::span<const Complex>(kernel));
        bluestein_ = std::move(b);
    }

    void run_bluestein(std::span<const Complex> in, std::span<Complex> out) const {
        const Bluestein& b = *bluestein_;
        std::vector<Complex> a(b.m, Complex(0));
        for (std::size_t k = 0; k < n_; ++k) a[k] = in[k] * b.chirp[k];
        std::vector<Complex> fa = b.inner->forward(std::span<const Complex>(a));
        // Inverse transform via conjugation: ifft(x) = conj(fft(conj(x))) / m.
        for (std::size_t k = 0; k < b.m; ++k) fa[k] = std::conj(fa[k] * b.kernel_fft[k]);
        std::vector<Complex> conv = b.inner->forward(std::span<const Complex>(fa));
        const Scalar scale = Scalar(1) / static_cast<Scalar>(b.m);
        for (std::size_t k = 0; k < n_; ++k) out[k] = std::conj(conv[k]) * scale * b.chirp[k];
    }

    std::size_t n_;
    std::vector<std::size_t> factors_;
    std::vector<Complex> twiddles_;
    std::shared_ptr<const Bluestein> bluestein_;
};

} // namespace sigclass

#endif // SIGCLASS_FFT_HPP
