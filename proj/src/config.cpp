#include "matter/config.hpp"

#include <cctype>
#include <fstream>

#include "matter/error.hpp"

namespace matter {

void ModelConfig::validate() const {
    if (vocab_size <= 0) throw ConfigError("vocab_size must be positive");
    if (j < 1 || j >= L_enc) throw ConfigError("split layer j must satisfy 1 <= j < L_enc");
    if (l < 1) throw ConfigError("memory length l must be >= 1");
    if (d_model % n_heads != 0) throw ConfigError("d_model must be divisible by n_heads");
    if (L_dec < 1) throw ConfigError("decoder needs at least one layer");
    if (max_seq < 1) throw ConfigError("max_seq must be >= 1");
}

void TrainingConfig::validate() const {
    if (lambda_g <= 0.0) throw ConfigError("lambda_g must be > 0");
    if (lambda_ae_qa < 0.0 || lambda_ae_prg < 0.0) throw ConfigError("lambda_ae must be >= 0");
    if (quota_qa < 0 || quota_prg < 0) throw ConfigError("quotas must be >= 0");
    if (quota_qa + quota_prg != k) throw ConfigError("quotas must sum to k");
    if (batch_size < 1 || epochs < 0) throw ConfigError("bad batch_size/epochs");
}

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace

ConfigMap load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open config file: " + path);
    ConfigMap out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw FormatError(path + ":" + std::to_string(lineno) + ": expected key=value");
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

int config_int(const ConfigMap& cfg, const std::string& key, int fallback) {
    auto it = cfg.find(key);
    if (it == cfg.end()) return fallback;
    try {
        return std::stoi(it->second);
    } catch (const std::exception&) {
        throw FormatError("config key '" + key + "': not an integer: " + it->second);
    }
}

double config_double(const ConfigMap& cfg, const std::string& key, double fallback) {
    auto it = cfg.find(key);
    if (it == cfg.end()) return fallback;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw FormatError("config key '" + key + "': not a number: " + it->second);
    }
}

std::string config_str(const ConfigMap& cfg, const std::string& key, const std::string& fallback) {
    auto it = cfg.find(key);
    return it == cfg.end() ? fallback : it->second;
}

}  // namespace matter
