#pragma once

#include <string>
#include <vector>

#include "mvd/types.hpp"

namespace mvd {

enum class WindowKind { hann, rectangular };
enum class TFKind { stft, spectrogram, pseudo_wd };

std::string to_string(TFKind kind);
std::string to_string(WindowKind kind);
WindowKind parse_window_kind(const std::string& s);

struct TFConfig {
    int window_length = 64;
    WindowKind window = WindowKind::hann;
    int hop = 1;

    void validate(Eigen::Index signal_length) const;
};

// One row per time position, one column per frequency bin. STFT values live
// in `complex_values`; spectrogram and pseudo-WD values in `real_values`.
struct TFRepresentation {
    TFKind kind = TFKind::stft;
    CMatrix complex_values;
    RMatrix real_values;
    std::vector<int> time_positions;
    int window_length = 0;

    Eigen::Index frames() const;
    Eigen::Index bins() const;
    // |STFT| for stft; the stored real values otherwise.
    RMatrix magnitude() const;
};

// w(m), m = 0..Sw-1 (periodic Hann).
RVector make_window(const TFConfig& cfg);

// STFT(n,k) = Σ_{m=0}^{Sw-1} w(m)·x(n+m)·e^{-j2πmk/Sw}, x zero outside
// its support, n = 0, hop, 2·hop, ... < len(x).
TFRepresentation stft(const CVector& x, const TFConfig& cfg);

TFRepresentation spectrogram(const CVector& x, const TFConfig& cfg);

// WD(n,k) = Σ_{m=-Sw/2}^{Sw/2-1} w(m)w(-m)·x(n+m)·x*(n-m)·e^{-j4πmk/Sw},
// with the window indexed about its center. Stored as the real part.
TFRepresentation pseudo_wd(const CVector& x, const TFConfig& cfg);

inline constexpr double kDefaultSupportThreshold = 0.05;

// p in (0,1]: Σ |STFT|^p (= Σ SPEC^{p/2}). p = 0: number of cells with
// |STFT| > tau·max|STFT|. Only stft and spectrogram representations.
double concentration_measure(const TFRepresentation& tfr, double p,
                             double tau = kDefaultSupportThreshold);

}  // namespace mvd
