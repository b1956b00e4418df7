#include "pbgsim/config.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pbgsim {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    size_t pos = 0;
    while (true) {
        size_t next = s.find(sep, pos);
        if (next == std::string::npos) {
            parts.push_back(s.substr(pos));
            break;
        }
        parts.push_back(s.substr(pos, next - pos));
        pos = next + 1;
    }
    return parts;
}

double parse_real(const std::string& text, const std::string& what) {
    const std::string t = trim(text);
    if (!t.empty()) {
        char* end = nullptr;
        const double v = std::strtod(t.c_str(), &end);
        if (end == t.c_str() + t.size()) return v;
    }
    throw std::invalid_argument("bad numeric value '" + text + "' for " + what);
}

int parse_int(const std::string& text, const std::string& what) {
    const std::string t = trim(text);
    if (!t.empty()) {
        char* end = nullptr;
        const long v = std::strtol(t.c_str(), &end, 10);
        if (end == t.c_str() + t.size()) return static_cast<int>(v);
    }
    throw std::invalid_argument("bad integer value '" + text + "' for " + what);
}

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// "path*coeff + path*coeff : start stop count"; bare paths mean coeff 1.
ScanAxis parse_axis(const std::string& text, const std::string& what) {
    const size_t colon = text.rfind(':');
    if (colon == std::string::npos) {
        throw std::invalid_argument(what + ": expected '<terms> : <start> <stop> <count>'");
    }
    ScanAxis axis;
    for (const std::string& raw : split(text.substr(0, colon), '+')) {
        const std::string term_text = trim(raw);
        if (term_text.empty()) {
            throw std::invalid_argument(what + ": empty axis term");
        }
        AxisTerm term;
        const size_t star = term_text.find('*');
        if (star == std::string::npos) {
            term.path = term_text;
        } else {
            term.path = trim(term_text.substr(0, star));
            term.coeff = parse_real(term_text.substr(star + 1), what + " coefficient");
        }
        axis.terms.push_back(term);
    }
    std::istringstream range(text.substr(colon + 1));
    std::string start, stop, count;
    if (!(range >> start >> stop >> count) || !(range >> std::ws).eof()) {
        throw std::invalid_argument(what + ": expected '<start> <stop> <count>' after ':'");
    }
    axis.start = parse_real(start, what + " start");
    axis.stop = parse_real(stop, what + " stop");
    axis.count = parse_int(count, what + " count");
    return axis;
}

std::string format_axis(const ScanAxis& axis) {
    std::string out;
    for (size_t i = 0; i < axis.terms.size(); ++i) {
        if (i > 0) out += " + ";
        out += axis.terms[i].path;
        if (axis.terms[i].coeff != 1.0) {
            out += "*" + format_real(axis.terms[i].coeff);
        }
    }
    out += " : " + format_real(axis.start) + " " + format_real(axis.stop) + " " +
           std::to_string(axis.count);
    return out;
}

Complex* device_complex(Config& c, const std::string& key) {
    if (key == "k_s") return &c.device.k_s;
    if (key == "k_i") return &c.device.k_i;
    if (key == "k_p") return &c.device.k_p;
    if (key == "k_f") return &c.device.k_f;
    if (key == "k_b") return &c.device.k_b;
    return nullptr;
}

double* device_real(Config& c, const std::string& key) {
    if (key == "delta_s") return &c.device.delta_s;
    if (key == "delta_i") return &c.device.delta_i;
    if (key == "delta_p") return &c.device.delta_p;
    if (key == "delta_f") return &c.device.delta_f;
    if (key == "delta_b") return &c.device.delta_b;
    if (key == "length") return &c.device.length;
    return nullptr;
}

Complex* boundary_complex(Config& c, const std::string& key) {
    if (key == "a_sf0") return &c.boundary.a_sf0;
    if (key == "a_if0") return &c.boundary.a_if0;
    if (key == "a_pf0") return &c.boundary.a_pf0;
    if (key == "a_sbL") return &c.boundary.a_sbL;
    if (key == "a_ibL") return &c.boundary.a_ibL;
    if (key == "a_pbL") return &c.boundary.a_pbL;
    return nullptr;
}

int mode_suffix(const std::string& key, const std::string& prefix) {
    if (key.size() != prefix.size() + 2 || key.compare(0, prefix.size(), prefix) != 0) {
        return -1;
    }
    for (int m = 0; m < kModes; ++m) {
        if (key.compare(prefix.size(), 2, mode_key(m)) == 0) return m;
    }
    return -1;
}

double* input_real(Config& c, const std::string& key) {
    if (int m = mode_suffix(key, "r_"); m >= 0) return &c.input.modes[m].r;
    if (int m = mode_suffix(key, "theta_"); m >= 0) return &c.input.modes[m].theta;
    if (int m = mode_suffix(key, "n_ch_"); m >= 0) return &c.input.modes[m].n_ch;
    return nullptr;
}

Complex* input_complex(Config& c, const std::string& key) {
    if (int m = mode_suffix(key, "xi_"); m >= 0) return &c.input.modes[m].xi;
    return nullptr;
}

// std::complex guarantees array-compatible layout.
double& complex_part(Complex& v, bool real_part) {
    return reinterpret_cast<double(&)[2]>(v)[real_part ? 0 : 1];
}

void apply_key(Config& c, const std::string& section, const std::string& key,
               const std::string& value) {
    const std::string what = section + "." + key;
    if (section == "device") {
        if (Complex* f = device_complex(c, key)) {
            *f = parse_complex(value);
            return;
        }
        if (double* f = device_real(c, key)) {
            *f = parse_real(value, what);
            return;
        }
    } else if (section == "boundary") {
        if (Complex* f = boundary_complex(c, key)) {
            *f = parse_complex(value);
            return;
        }
    } else if (section == "input_state") {
        if (Complex* f = input_complex(c, key)) {
            *f = parse_complex(value);
            return;
        }
        if (double* f = input_real(c, key)) {
            *f = parse_real(value, what);
            return;
        }
    } else if (section == "scan") {
        if (key == "axis1") {
            c.scan.axis1 = parse_axis(value, what);
            return;
        }
        if (key == "axis2") {
            c.scan.axis2 = parse_axis(value, what);
            return;
        }
        if (key == "observables") {
            c.scan.observables.clear();
            if (trim(value) != "all") {
                for (const std::string& name : split(value, ',')) {
                    c.scan.observables.push_back(trim(name));
                }
            }
            return;
        }
        if (key == "output_dir") {
            c.scan.output_dir = trim(value);
            return;
        }
        if (key == "stem") {
            c.scan.stem = trim(value);
            return;
        }
    } else if (section == "solver") {
        if (key == "grid_points") {
            c.solver.grid_points = parse_int(value, what);
            return;
        }
        if (key == "tolerance") {
            c.solver.tolerance = parse_real(value, what);
            return;
        }
        if (key == "max_iterations") {
            c.solver.max_iterations = parse_int(value, what);
            return;
        }
        if (key == "fluct_tolerance") {
            c.solver.fluct_tolerance = parse_real(value, what);
            return;
        }
    } else {
        throw std::invalid_argument("unknown config section [" + section + "]");
    }
    throw std::invalid_argument("unknown config key '" + key + "' in section [" +
                                section + "]");
}

}  // namespace

Complex parse_complex(const std::string& text) {
    const std::string t = trim(text);
    auto fail = [&text]() -> double {
        throw std::invalid_argument("bad complex value '" + text + "'");
    };
    auto to_double = [&fail](const std::string& s) -> double {
        if (s.empty() || s == "+") return 1.0;
        if (s == "-") return -1.0;
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (end != s.c_str() + s.size()) return fail();
        return v;
    };
    if (t.empty()) fail();
    if (t.back() != 'i') {
        if (t == "+" || t == "-") fail();
        return Complex(to_double(t), 0.0);
    }
    const std::string body = t.substr(0, t.size() - 1);
    size_t sign = std::string::npos;
    for (size_t p = body.size(); p-- > 1;) {
        if ((body[p] == '+' || body[p] == '-') &&
            body[p - 1] != 'e' && body[p - 1] != 'E') {
            sign = p;
            break;
        }
    }
    if (sign == std::string::npos) {
        return Complex(0.0, to_double(body));
    }
    const std::string real_part = body.substr(0, sign);
    if (real_part == "+" || real_part == "-") fail();
    return Complex(to_double(real_part), to_double(body.substr(sign)));
}

std::string format_complex(Complex value) {
    char buf[96];
    if (value.imag() == 0.0) {
        std::snprintf(buf, sizeof(buf), "%.17g", value.real());
    } else if (value.real() == 0.0) {
        std::snprintf(buf, sizeof(buf), "%.17gi", value.imag());
    } else {
        std::snprintf(buf, sizeof(buf), "%.17g%+.17gi", value.real(), value.imag());
    }
    return buf;
}

Config parse_config(std::istream& in) {
    Config c;
    std::string section;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') {
                throw std::invalid_argument("line " + std::to_string(line_no) +
                                            ": unterminated section header");
            }
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("line " + std::to_string(line_no) +
                                        ": expected 'key = value'");
        }
        if (section.empty()) {
            throw std::invalid_argument("line " + std::to_string(line_no) +
                                        ": key outside any section");
        }
        try {
            apply_key(c, section, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
        } catch (const std::invalid_argument& err) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": " +
                                        err.what());
        }
    }
    return c;
}

Config parse_config_string(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

Config load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config file '" + path + "'");
    }
    return parse_config(in);
}

std::string serialize_config(const Config& c) {
    std::ostringstream out;
    out << "[device]\n";
    out << "k_s = " << format_complex(c.device.k_s) << "\n";
    out << "k_i = " << format_complex(c.device.k_i) << "\n";
    out << "k_p = " << format_complex(c.device.k_p) << "\n";
    out << "k_f = " << format_complex(c.device.k_f) << "\n";
    out << "k_b = " << format_complex(c.device.k_b) << "\n";
    out << "delta_s = " << format_real(c.device.delta_s) << "\n";
    out << "delta_i = " << format_real(c.device.delta_i) << "\n";
    out << "delta_p = " << format_real(c.device.delta_p) << "\n";
    out << "delta_f = " << format_real(c.device.delta_f) << "\n";
    out << "delta_b = " << format_real(c.device.delta_b) << "\n";
    out << "length = " << format_real(c.device.length) << "\n";
    out << "\n[boundary]\n";
    out << "a_sf0 = " << format_complex(c.boundary.a_sf0) << "\n";
    out << "a_if0 = " << format_complex(c.boundary.a_if0) << "\n";
    out << "a_pf0 = " << format_complex(c.boundary.a_pf0) << "\n";
    out << "a_sbL = " << format_complex(c.boundary.a_sbL) << "\n";
    out << "a_ibL = " << format_complex(c.boundary.a_ibL) << "\n";
    out << "a_pbL = " << format_complex(c.boundary.a_pbL) << "\n";
    out << "\n[input_state]\n";
    for (int m = 0; m < kModes; ++m) {
        const ModeInput& mi = c.input.modes[m];
        const char* k = mode_key(m);
        out << "r_" << k << " = " << format_real(mi.r) << "\n";
        out << "theta_" << k << " = " << format_real(mi.theta) << "\n";
        out << "n_ch_" << k << " = " << format_real(mi.n_ch) << "\n";
        out << "xi_" << k << " = " << format_complex(mi.xi) << "\n";
    }
    out << "\n[scan]\n";
    if (c.scan.axis1) out << "axis1 = " << format_axis(*c.scan.axis1) << "\n";
    if (c.scan.axis2) out << "axis2 = " << format_axis(*c.scan.axis2) << "\n";
    if (c.scan.observables.empty()) {
        out << "observables = all\n";
    } else {
        out << "observables = ";
        for (size_t i = 0; i < c.scan.observables.size(); ++i) {
            if (i > 0) out << ", ";
            out << c.scan.observables[i];
        }
        out << "\n";
    }
    out << "output_dir = " << c.scan.output_dir << "\n";
    out << "stem = " << c.scan.stem << "\n";
    out << "\n[solver]\n";
    out << "grid_points = " << c.solver.grid_points << "\n";
    out << "tolerance = " << format_real(c.solver.tolerance) << "\n";
    out << "max_iterations = " << c.solver.max_iterations << "\n";
    out << "fluct_tolerance = " << format_real(c.solver.fluct_tolerance) << "\n";
    return out.str();
}

double& resolve_parameter(Config& c, const std::string& path) {
    const std::vector<std::string> parts = split(path, '.');
    auto fail = [&path]() -> double& {
        throw std::invalid_argument("unknown parameter path '" + path + "'");
    };
    if (parts.size() < 2 || parts.size() > 3) return fail();
    const std::string& section = parts[0];
    const std::string& key = parts[1];
    const bool has_suffix = parts.size() == 3;
    const bool suffix_re = has_suffix && parts[2] == "re";
    const bool suffix_im = has_suffix && parts[2] == "im";
    if (has_suffix && !suffix_re && !suffix_im) return fail();

    Complex* cf = nullptr;
    double* rf = nullptr;
    if (section == "device") {
        cf = device_complex(c, key);
        rf = device_real(c, key);
    } else if (section == "boundary") {
        cf = boundary_complex(c, key);
    } else if (section == "input_state") {
        cf = input_complex(c, key);
        rf = input_real(c, key);
    } else {
        return fail();
    }
    if (cf) {
        if (!has_suffix) {
            throw std::invalid_argument("parameter path '" + path +
                                        "' addresses a complex field; add .re or .im");
        }
        return complex_part(*cf, suffix_re);
    }
    if (rf) {
        if (has_suffix) {
            throw std::invalid_argument("parameter path '" + path +
                                        "' addresses a real field; drop the suffix");
        }
        return *rf;
    }
    return fail();
}

void validate(const Config& config) {
    validate(config.device, config.boundary);
    validate(config.input);
    for (int m = 0; m < kModes; ++m) {
        if (config.boundary.input_amplitude(m) != 0.0 &&
            config.input.modes[m].xi != 0.0) {
            throw std::invalid_argument(
                std::string("mode ") + mode_key(m) +
                ": coherent fluctuation input requires a zero mean-field "
                "boundary amplitude");
        }
    }
    if (config.solver.grid_points < 2) {
        throw std::invalid_argument("solver.grid_points must be >= 2");
    }
    if (!(config.solver.tolerance > 0.0)) {
        throw std::invalid_argument("solver.tolerance must be positive");
    }
    if (config.solver.max_iterations < 1) {
        throw std::invalid_argument("solver.max_iterations must be >= 1");
    }
    if (!(config.solver.fluct_tolerance > 0.0)) {
        throw std::invalid_argument("solver.fluct_tolerance must be positive");
    }
    if (config.scan.axis2 && !config.scan.axis1) {
        throw std::invalid_argument("scan.axis2 requires scan.axis1");
    }
    Config scratch = config;
    for (const auto* axis : {&config.scan.axis1, &config.scan.axis2}) {
        if (!axis->has_value()) continue;
        const ScanAxis& a = **axis;
        if (a.count < 1) throw std::invalid_argument("scan axis count must be >= 1");
        if (a.terms.empty()) throw std::invalid_argument("scan axis needs a term");
        for (const AxisTerm& term : a.terms) {
            resolve_parameter(scratch, term.path);
            if (!std::isfinite(term.coeff)) {
                throw std::invalid_argument("scan axis coefficient must be finite");
            }
        }
    }
    if (config.scan.stem.empty()) {
        throw std::invalid_argument("scan.stem must not be empty");
    }
}

}  // namespace pbgsim
