#include "mvd/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace mvd::io {

ParseError::ParseError(const std::string& what, int line)
    : InvalidArgument(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::map<std::string, std::string> parse_header(const std::string& line, const std::string& type) {
    if (line.rfind("# ", 0) != 0) throw ParseError("missing '# type=...' header", 1);
    std::istringstream ss(line.substr(2));
    std::map<std::string, std::string> kv;
    std::string tok;
    while (ss >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw ParseError("bad header token '" + tok + "'", 1);
        kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    if (kv["type"] != type)
        throw ParseError("expected type=" + type + ", got type=" + kv["type"], 1);
    return kv;
}

int header_int(const std::map<std::string, std::string>& kv, const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw ParseError("header is missing " + key, 1);
    int v = 0;
    const auto* b = it->second.data();
    const auto [ptr, ec] = std::from_chars(b, b + it->second.size(), v);
    if (ec != std::errc{} || ptr != b + it->second.size())
        throw ParseError("header field " + key + " is not an integer", 1);
    return v;
}

double parse_number(std::string_view s, int line) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ParseError("not a number: '" + std::string(s) + "'", line);
    return v;
}

struct Table {
    int n0 = 0;
    CMatrix data;
};

Table read_table(std::istream& is, const std::string& type, const std::string& count_key) {
    std::string line;
    if (!std::getline(is, line)) throw ParseError("empty file", 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto kv = parse_header(line, type);
    const int rows = header_int(kv, count_key);
    const int n = header_int(kv, "N");
    const int n0 = header_int(kv, "n0");
    if (rows < 1 || n < 1) throw ParseError(count_key + " and N must be positive", 1);

    Table t;
    t.n0 = n0;
    t.data.resize(rows, n);
    const std::size_t fields = 1 + 2 * static_cast<std::size_t>(rows);
    for (int i = 0; i < n; ++i) {
        const int lineno = i + 2;
        if (!std::getline(is, line)) throw ParseError("expected " + std::to_string(n) + " sample lines", lineno);
        std::vector<std::string_view> parts;
        std::string_view rest(line);
        for (;;) {
            const auto comma = rest.find(',');
            parts.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (parts.size() != fields)
            throw ParseError("expected " + std::to_string(fields) + " fields, got " +
                                 std::to_string(parts.size()),
                             lineno);
        const double idx = parse_number(parts[0], lineno);
        if (idx != static_cast<double>(n0 + i))
            throw ParseError("sample index " + std::string(parts[0]) + " out of sequence", lineno);
        for (int r = 0; r < rows; ++r)
            t.data(r, i) = cplx(parse_number(parts[1 + 2 * r], lineno), parse_number(parts[2 + 2 * r], lineno));
    }
    while (std::getline(is, line)) {
        if (!line.empty() && line != "\r") throw ParseError("trailing data after the last sample", n + 2);
    }
    return t;
}

void write_table(std::ostream& os, const CMatrix& data, int n0) {
    for (Eigen::Index i = 0; i < data.cols(); ++i) {
        os << (n0 + i);
        for (Eigen::Index r = 0; r < data.rows(); ++r)
            os << ',' << format_double(data(r, i).real()) << ',' << format_double(data(r, i).imag());
        os << '\n';
    }
}

}  // namespace

void write_signal_csv(std::ostream& os, const MultivariateSignal& x) {
    os << "# type=signal S=" << x.sensor_count() << " N=" << x.sample_count() << " n0=" << x.n0 << '\n';
    write_table(os, x.data, x.n0);
}

MultivariateSignal read_signal_csv(std::istream& is) {
    Table t = read_table(is, "signal", "S");
    return MultivariateSignal{std::move(t.data), t.n0};
}

void write_components_csv(std::ostream& os, const ComponentSet& c) {
    os << "# type=components P=" << c.component_count() << " N=" << c.sample_count() << " n0=" << c.n0
       << '\n';
    write_table(os, c.data, c.n0);
}

ComponentSet read_components_csv(std::istream& is) {
    Table t = read_table(is, "components", "P");
    return ComponentSet{std::move(t.data), t.n0};
}

void write_eigenvalues_csv(std::ostream& os, const RVector& eigenvalues) {
    os << "index,lambda\n";
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
        os << (i + 1) << ',' << format_double(eigenvalues[i]) << '\n';
}

void write_tfr_csv(std::ostream& os, const TFRepresentation& tfr) {
    const RMatrix v = tfr.magnitude();
    os << "# type=tfr kind=" << to_string(tfr.kind) << " T=" << v.rows() << " K=" << v.cols() << '\n';
    for (Eigen::Index t = 0; t < v.rows(); ++t) {
        os << tfr.time_positions[static_cast<std::size_t>(t)];
        for (Eigen::Index k = 0; k < v.cols(); ++k) os << ',' << format_double(v(t, k));
        os << '\n';
    }
}

void write_pgm(std::ostream& os, const TFRepresentation& tfr) {
    const RMatrix v = tfr.magnitude().cwiseAbs();
    const Eigen::Index frames = v.rows();
    const Eigen::Index bins = v.cols();
    const double peak = v.size() ? v.maxCoeff() : 0.0;
    // Spectrogram cells are powers; the others are amplitudes.
    const double db_scale = tfr.kind == TFKind::spectrogram ? 10.0 : 20.0;
    os << "P5\n" << frames << ' ' << bins << "\n255\n";
    std::vector<unsigned char> row(static_cast<std::size_t>(frames));
    for (Eigen::Index k = bins - 1; k >= 0; --k) {
        for (Eigen::Index t = 0; t < frames; ++t) {
            double level = -60.0;
            if (peak > 0.0 && v(t, k) > 0.0) level = std::max(-60.0, db_scale * std::log10(v(t, k) / peak));
            row[static_cast<std::size_t>(t)] =
                static_cast<unsigned char>(std::lround(255.0 * (level + 60.0) / 60.0));
        }
        os.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
}

void write_measures_csv(std::ostream& os, const std::vector<double>& measures) {
    os << "index,measure\n";
    for (std::size_t i = 0; i < measures.size(); ++i) os << (i + 1) << ',' << format_double(measures[i]) << '\n';
}

void write_coeffs_csv(std::ostream& os, const std::vector<CoefficientVector>& coeffs) {
    const Eigen::Index m = coeffs.empty() ? 0 : coeffs.front().size();
    os << "component";
    for (Eigen::Index j = 0; j < m; ++j) os << ",b" << (j + 1) << "_re,b" << (j + 1) << "_im";
    os << '\n';
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        os << (i + 1);
        for (Eigen::Index j = 0; j < coeffs[i].size(); ++j)
            os << ',' << format_double(coeffs[i].beta[j].real()) << ',' << format_double(coeffs[i].beta[j].imag());
        os << '\n';
    }
}

ComponentDescriptor descriptor_from_json(const nlohmann::json& j) {
    static const std::vector<std::string> known = {"family", "amplitude", "center", "width", "freq",
                                                   "chirp_rate", "fm_depth", "fm_rate", "fm_phase", "note"};
    if (!j.is_object()) throw InvalidArgument("component descriptor must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw InvalidArgument("unknown descriptor field '" + key + "'");
    ComponentDescriptor d;
    d.family = j.value("family", d.family);
    d.amplitude = j.value("amplitude", d.amplitude);
    d.center = j.value("center", d.center);
    if (!j.contains("width")) throw InvalidArgument("component descriptor needs a width");
    d.width = j.at("width").get<double>();
    d.freq = j.value("freq", d.freq);
    d.chirp_rate = j.value("chirp_rate", d.chirp_rate);
    d.fm_depth = j.value("fm_depth", d.fm_depth);
    d.fm_rate = j.value("fm_rate", d.fm_rate);
    d.fm_phase = j.value("fm_phase", d.fm_phase);
    d.validate();
    return d;
}

nlohmann::json descriptor_to_json(const ComponentDescriptor& d) {
    return {{"family", d.family},     {"amplitude", d.amplitude}, {"center", d.center},
            {"width", d.width},       {"freq", d.freq},           {"chirp_rate", d.chirp_rate},
            {"fm_depth", d.fm_depth}, {"fm_rate", d.fm_rate},     {"fm_phase", d.fm_phase}};
}

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InvalidArgument("cannot open '" + path.string() + "' for writing");
    return os;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InvalidArgument("cannot open '" + path.string() + "'");
    return is;
}

}  // namespace mvd::io
