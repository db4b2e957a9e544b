#include "lumen/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "lumen/errors.hpp"

namespace lumen {

void PipelineConfig::validate() const {
    enhancement.validate();
    threshold.validate();
    detector.validate();
    cull.validate();
    if (stages.fixed_threshold < 1)
        throw ConfigError("stages.fixed_threshold must be >= 1");
}

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' has non-numeric value '" + value + "'");
    }
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' has non-integer value '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "on" || value == "1") return true;
    if (value == "false" || value == "off" || value == "0") return false;
    throw ConfigError("config: key '" + key + "' has non-boolean value '" + value + "'");
}

}  // namespace

PipelineConfig parse_config(const std::string& text) {
    PipelineConfig cfg;

    using Setter = std::function<void(const std::string&, const std::string&)>;
    const std::map<std::string, std::map<std::string, Setter>> schema = {
        {"enhancement",
         {
             {"sigma", [&](const std::string& k, const std::string& v) { cfg.enhancement.sigma = parse_double(k, v); }},
             {"kernel_size", [&](const std::string& k, const std::string& v) { cfg.enhancement.kernel_size = parse_int(k, v); }},
             {"lambda", [&](const std::string& k, const std::string& v) { cfg.enhancement.lambda = parse_double(k, v); }},
             {"tau", [&](const std::string& k, const std::string& v) { cfg.enhancement.tau = parse_double(k, v); }},
             {"mu_expected", [&](const std::string& k, const std::string& v) { cfg.enhancement.mu_expected = parse_double(k, v); }},
             {"t_bright", [&](const std::string& k, const std::string& v) { cfg.enhancement.t_bright = parse_double(k, v); }},
             {"t_dim", [&](const std::string& k, const std::string& v) { cfg.enhancement.t_dim = parse_double(k, v); }},
             {"epsilon", [&](const std::string& k, const std::string& v) { cfg.enhancement.epsilon = parse_double(k, v); }},
             {"eta", [&](const std::string& k, const std::string& v) { cfg.enhancement.eta = parse_double(k, v); }},
         }},
        {"threshold",
         {
             {"alpha", [&](const std::string& k, const std::string& v) { cfg.threshold.alpha = parse_double(k, v); }},
             {"beta", [&](const std::string& k, const std::string& v) { cfg.threshold.beta = parse_double(k, v); }},
             {"delta", [&](const std::string& k, const std::string& v) { cfg.threshold.delta = parse_double(k, v); }},
             {"subregion_size", [&](const std::string& k, const std::string& v) { cfg.threshold.subregion_size = parse_int(k, v); }},
             {"f_t_min", [&](const std::string& k, const std::string& v) { cfg.threshold.f_t_min = parse_double(k, v); }},
         }},
        {"detector",
         {
             {"n_levels", [&](const std::string& k, const std::string& v) { cfg.detector.n_levels = parse_int(k, v); }},
             {"scale_factor", [&](const std::string& k, const std::string& v) { cfg.detector.scale_factor = parse_double(k, v); }},
             {"nms_radius", [&](const std::string& k, const std::string& v) { cfg.detector.nms_radius = parse_int(k, v); }},
             {"max_features", [&](const std::string& k, const std::string& v) { cfg.detector.max_features = parse_int(k, v); }},
         }},
        {"cull",
         {
             {"max_per_leaf", [&](const std::string& k, const std::string& v) { cfg.cull.max_per_leaf = parse_int(k, v); }},
             {"max_depth", [&](const std::string& k, const std::string& v) { cfg.cull.max_depth = parse_int(k, v); }},
             {"d_opt", [&](const std::string& k, const std::string& v) { cfg.cull.d_opt = parse_double(k, v); }},
             {"k", [&](const std::string& k, const std::string& v) { cfg.cull.k = parse_double(k, v); }},
             {"rho", [&](const std::string& k, const std::string& v) { cfg.cull.rho = parse_double(k, v); }},
             {"h_th", [&](const std::string& k, const std::string& v) { cfg.cull.h_th = parse_double(k, v); }},
             {"w1", [&](const std::string& k, const std::string& v) { cfg.cull.w1 = parse_double(k, v); }},
             {"w2", [&](const std::string& k, const std::string& v) { cfg.cull.w2 = parse_double(k, v); }},
             {"s_min", [&](const std::string& k, const std::string& v) { cfg.cull.s_min = parse_double(k, v); }},
             {"invert_lighting_term", [&](const std::string& k, const std::string& v) { cfg.cull.invert_lighting_term = parse_bool(k, v); }},
         }},
        {"stages",
         {
             {"enhance", [&](const std::string& k, const std::string& v) { cfg.stages.enhance = parse_bool(k, v); }},
             {"adaptive_threshold", [&](const std::string& k, const std::string& v) { cfg.stages.adaptive_threshold = parse_bool(k, v); }},
             {"cull", [&](const std::string& k, const std::string& v) { cfg.stages.cull = parse_bool(k, v); }},
             {"fixed_threshold", [&](const std::string& k, const std::string& v) { cfg.stages.fixed_threshold = parse_double(k, v); }},
         }},
    };

    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.resize(comment);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(line_no) + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!schema.contains(section))
                throw ConfigError("config line " + std::to_string(line_no) + ": unknown section '" + section + "'");
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty())
            throw ConfigError("config line " + std::to_string(line_no) + ": key '" + key + "' outside any section");

        const auto& keys = schema.at(section);
        const auto it = keys.find(key);
        if (it == keys.end())
            throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + section + "." + key + "'");
        it->second(key, value);
    }

    cfg.validate();
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace lumen
