#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "mvd/decomposer.hpp"
#include "mvd/signal.hpp"
#include "mvd/tf.hpp"

namespace mvd::io {

// Malformed input file; `line` is 1-based (0 when not line-specific).
class ParseError : public InvalidArgument {
public:
    ParseError(const std::string& what, int line);
    int line() const { return line_; }

private:
    int line_;
};

// Signal CSV:
//   # type=signal S=<int> N=<int> n0=<int>
//   n,ch1_re,ch1_im,...,chS_re,chS_im        (one line per sample, %.17g)
void write_signal_csv(std::ostream& os, const MultivariateSignal& x);
MultivariateSignal read_signal_csv(std::istream& is);

// Same layout with "# type=components P=<int> N=<int> n0=<int>".
void write_components_csv(std::ostream& os, const ComponentSet& c);
ComponentSet read_components_csv(std::istream& is);

// "index,lambda" header, then 1-based index and eigenvalue, descending.
void write_eigenvalues_csv(std::ostream& os, const RVector& eigenvalues);

// "# type=tfr kind=<k> T=<int> K=<int>", then "n,v_0,...,v_{K-1}" per time
// position: |STFT| for stft, SPEC for spec, the real WD for wd.
void write_tfr_csv(std::ostream& os, const TFRepresentation& tfr);

// Binary P5, K rows (highest bin on top) by T columns, 8-bit, log-scaled
// relative to the peak with a -60 dB floor.
void write_pgm(std::ostream& os, const TFRepresentation& tfr);

// "index,measure"
void write_measures_csv(std::ostream& os, const std::vector<double>& measures);
// "component,b1_re,b1_im,...,bM_re,bM_im"
void write_coeffs_csv(std::ostream& os, const std::vector<CoefficientVector>& coeffs);

std::string format_double(double v);

ComponentDescriptor descriptor_from_json(const nlohmann::json& j);
nlohmann::json descriptor_to_json(const ComponentDescriptor& d);

// Opens for writing (binary) and throws on failure.
std::ofstream open_output(const std::filesystem::path& path);
std::ifstream open_input(const std::filesystem::path& path);

}  // namespace mvd::io
