// Model and training hyperparameters plus the flat key=value config file.
#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace matter {

struct ModelConfig {
    int vocab_size = 0;
    int d_model = 128;
    int n_heads = 4;
    int d_ff = 256;
    int L_enc = 6;  // total encoder layers
    int L_dec = 4;  // decoder layers
    int j = 4;      // split layer: prefix encoding uses layers 1..j
    int l = 2;      // memory length (vectors per record)
    int max_seq = 64;

    void validate() const;
};

enum class TrainPhase { PRE_FINETUNE, FINETUNE };

struct TrainingConfig {
    double lambda_g = 1.0;
    double lambda_ae_qa = 0.3;
    double lambda_ae_prg = 0.0;  // > 0 switches on the QA/PRG objective
    int k = 10;
    int quota_qa = 5;
    int quota_prg = 5;
    double lr = 5e-4;
    int epochs = 10;
    int batch_size = 16;
    TrainPhase phase = TrainPhase::PRE_FINETUNE;
    uint64_t seed = 0;
    int threads = 0;  // 0 = hardware concurrency

    void validate() const;
};

using ConfigMap = std::map<std::string, std::string>;

// Flat "key = value" lines; '#' starts a comment. Missing file -> error.
ConfigMap load_config_file(const std::string& path);

int config_int(const ConfigMap& cfg, const std::string& key, int fallback);
double config_double(const ConfigMap& cfg, const std::string& key, double fallback);
std::string config_str(const ConfigMap& cfg, const std::string& key, const std::string& fallback);

}  // namespace matter
