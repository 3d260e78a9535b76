// Encoder-decoder transformer with a split encoder: the first j layers
// encode questions and knowledge alike (shared parameters), retrieved
// memories are injected at layer j, and the remaining layers cross-encode
// [memories : question] with full bidirectional attention. Pre-norm residual
// blocks, RMS norm, ReLU feed-forward, learned absolute positions applied at
// the embedding layer only.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "matter/config.hpp"
#include "matter/error.hpp"
#include "matter/records.hpp"
#include "matter/rng.hpp"
#include "matter/tensor.hpp"
#include "matter/text.hpp"

namespace matter {

// Fixed-length latent representation of one knowledge record.
template <class S>
struct NeuralMemoryT {
    int64_t record_id = 0;
    SourceType source_type = SourceType::QA;
    TensorPtr<S> vectors;  // [l x d_model]
};
using NeuralMemory = NeuralMemoryT<double>;

// Layer-j representations of a token sequence (questions and knowledge).
template <class S>
struct PrefixStateT {
    TensorPtr<S> hidden;  // [seq_len x d_model]
    int seq_len = 0;
    bool truncated = false;
};
using PrefixState = PrefixStateT<double>;

// Output of the upper encoder layers over [M : H^q].
template <class S>
struct CrossEncodedT {
    TensorPtr<S> hidden;  // [(k*l + |q|) x d_model]
    int rows() const { return hidden->shape[0]; }
};
using CrossEncoded = CrossEncodedT<double>;

// Context-length arithmetic: rows the decoder attends to.
constexpr int64_t memory_context_rows(int64_t k, int64_t l, int64_t q_len) { return k * l + q_len; }
constexpr int64_t fid_context_rows(int64_t k, int64_t c_len) { return k * c_len; }

template <class S>
ParamsT<S> init_params(const ModelConfig& cfg, Rng& rng) {
    cfg.validate();
    ParamsT<S> p;
    const double sd = 0.02;
    auto weight = [&](const std::string& name, int r, int c) {
        p.add(name, randn<S>({r, c}, rng, sd));
    };
    auto gain = [&](const std::string& name) { p.add(name, full<S>({cfg.d_model}, S(1))); };

    weight("tok_emb", cfg.vocab_size, cfg.d_model);
    weight("pos_enc", cfg.max_seq, cfg.d_model);
    weight("pos_dec", cfg.max_seq, cfg.d_model);
    weight("lm_head", cfg.d_model, cfg.vocab_size);

    for (int i = 0; i < cfg.L_enc; ++i) {
        const std::string base = "enc." + std::to_string(i);
        for (const char* w : {".attn.wq", ".attn.wk", ".attn.wv", ".attn.wo"})
            weight(base + w, cfg.d_model, cfg.d_model);
        gain(base + ".attn_norm");
        weight(base + ".ffn.w1", cfg.d_model, cfg.d_ff);
        weight(base + ".ffn.w2", cfg.d_ff, cfg.d_model);
        gain(base + ".ffn_norm");
    }
    gain("enc.final_norm");

    for (int i = 0; i < cfg.L_dec; ++i) {
        const std::string base = "dec." + std::to_string(i);
        for (const char* w : {".self.wq", ".self.wk", ".self.wv", ".self.wo"})
            weight(base + w, cfg.d_model, cfg.d_model);
        gain(base + ".self_norm");
        for (const char* w : {".cross.wq", ".cross.wk", ".cross.wv", ".cross.wo"})
            weight(base + w, cfg.d_model, cfg.d_model);
        gain(base + ".cross_norm");
        weight(base + ".ffn.w1", cfg.d_model, cfg.d_ff);
        weight(base + ".ffn.w2", cfg.d_ff, cfg.d_model);
        gain(base + ".ffn_norm");
    }
    gain("dec.final_norm");
    return p;
}

namespace model_detail {

// Additive causal mask: 0 on/below the diagonal, -1e9 above.
template <class S>
TensorPtr<S> causal_mask(int n) {
    auto m = zeros<S>({n, n});
    for (int r = 0; r < n; ++r)
        for (int c = r + 1; c < n; ++c) m->value[static_cast<int64_t>(r) * n + c] = S(-1e9);
    return m;
}

template <class S>
TensorPtr<S> mha(const TensorPtr<S>& x_q, const TensorPtr<S>& x_kv, const ModelConfig& cfg,
                 const ParamsT<S>& p, const std::string& prefix,
                 const TensorPtr<S>* mask = nullptr) {
    const int dh = cfg.d_model / cfg.n_heads;
    const S inv_sqrt = static_cast<S>(1.0 / std::sqrt(static_cast<double>(dh)));
    auto q = matmul(x_q, p.at(prefix + ".wq"));
    auto k = matmul(x_kv, p.at(prefix + ".wk"));
    auto v = matmul(x_kv, p.at(prefix + ".wv"));
    std::vector<TensorPtr<S>> heads;
    heads.reserve(cfg.n_heads);
    for (int h = 0; h < cfg.n_heads; ++h) {
        auto qh = slice_cols(q, h * dh, (h + 1) * dh);
        auto kh = slice_cols(k, h * dh, (h + 1) * dh);
        auto vh = slice_cols(v, h * dh, (h + 1) * dh);
        auto scores = scale(matmul_nt(qh, kh), inv_sqrt);
        if (mask) scores = add(scores, *mask);
        heads.push_back(matmul(softmax(scores, 1), vh));
    }
    return matmul(concat_cols(heads), p.at(prefix + ".wo"));
}

template <class S>
TensorPtr<S> ffn(const TensorPtr<S>& x, const ParamsT<S>& p, const std::string& base) {
    return matmul(relu(matmul(x, p.at(base + ".ffn.w1"))), p.at(base + ".ffn.w2"));
}

// Encoder layers [from, to).
template <class S>
TensorPtr<S> encoder_stack(TensorPtr<S> x, int from, int to, const ModelConfig& cfg,
                           const ParamsT<S>& p) {
    for (int i = from; i < to; ++i) {
        const std::string base = "enc." + std::to_string(i);
        auto normed = rms_norm(x, p.at(base + ".attn_norm"));
        x = add(x, mha(normed, normed, cfg, p, base + ".attn"));
        x = add(x, ffn(rms_norm(x, p.at(base + ".ffn_norm")), p, base));
    }
    return x;
}

}  // namespace model_detail

// Eq. of the split encoder: embeddings + positions through layers 1..j only.
// Shared verbatim between questions and knowledge records.
template <class S>
PrefixStateT<S> encode_prefix(const std::vector<int>& tokens, const ModelConfig& cfg,
                              const ParamsT<S>& p) {
    if (tokens.empty()) throw InputError("encode_prefix: empty token sequence");
    PrefixStateT<S> state;
    std::vector<int> toks = tokens;
    if (static_cast<int>(toks.size()) > cfg.max_seq) {
        toks.resize(static_cast<size_t>(cfg.max_seq));
        state.truncated = true;
    }
    const int t = static_cast<int>(toks.size());
    auto x = add(embed_rows(p.at("tok_emb"), toks), slice_rows(p.at("pos_enc"), 0, t));
    state.hidden = model_detail::encoder_stack(x, 0, cfg.j, cfg, p);
    state.seq_len = t;
    return state;
}

// Upper encoder layers over pre-concatenated [M : H^q] rows. Memories are
// not re-position-encoded; attention over the concatenation is unmasked.
template <class S>
CrossEncodedT<S> cross_encode_rows(const std::vector<TensorPtr<S>>& row_blocks,
                                   const ModelConfig& cfg, const ParamsT<S>& p) {
    std::vector<TensorPtr<S>> blocks;
    for (const auto& b : row_blocks)
        if (b && b->shape[0] > 0) blocks.push_back(b);
    if (blocks.empty()) throw InputError("cross_encode: no memories and no question rows");
    for (const auto& b : blocks)
        if (b->shape[1] != cfg.d_model)
            throw ConfigError("cross_encode: row width " + std::to_string(b->shape[1]) +
                              " does not match d_model " + std::to_string(cfg.d_model));
    auto x = blocks.size() == 1 ? blocks[0] : concat_rows(blocks);
    x = model_detail::encoder_stack(x, cfg.j, cfg.L_enc, cfg, p);
    CrossEncodedT<S> out;
    out.hidden = rms_norm(x, p.at("enc.final_norm"));
    return out;
}

// Concatenation order is [m_1 : m_2 : ... : m_k : H^q] in retrieval-rank
// order; row count is exactly k*l + |q|.
template <class S>
CrossEncodedT<S> cross_encode(const std::vector<NeuralMemoryT<S>>& memories,
                              const PrefixStateT<S>& q_state, const ModelConfig& cfg,
                              const ParamsT<S>& p) {
    std::vector<TensorPtr<S>> blocks;
    blocks.reserve(memories.size() + 1);
    for (const auto& m : memories) {
        if (m.vectors->shape.size() != 2 || m.vectors->shape[0] != cfg.l)
            throw ConfigError("cross_encode: memory for record " + std::to_string(m.record_id) +
                              " does not have l rows");
        blocks.push_back(m.vectors);
    }
    if (q_state.hidden) blocks.push_back(q_state.hidden);
    return cross_encode_rows(blocks, cfg, p);
}

// Teacher-forced decoder pass: causal self-attention over `in_tokens`
// (typically BOS-shifted targets), cross-attention over all ctx rows.
// Returns [len(in_tokens) x vocab] logits.
template <class S>
TensorPtr<S> decoder_logits(const TensorPtr<S>& ctx, const std::vector<int>& in_tokens,
                            const ModelConfig& cfg, const ParamsT<S>& p) {
    if (in_tokens.empty()) throw InputError("decoder_logits: empty input");
    if (static_cast<int>(in_tokens.size()) > cfg.max_seq)
        throw InputError("decoder_logits: sequence exceeds max_seq");
    const int t = static_cast<int>(in_tokens.size());
    auto x = add(embed_rows(p.at("tok_emb"), in_tokens), slice_rows(p.at("pos_dec"), 0, t));
    auto mask = model_detail::causal_mask<S>(t);
    for (int i = 0; i < cfg.L_dec; ++i) {
        const std::string base = "dec." + std::to_string(i);
        auto normed = rms_norm(x, p.at(base + ".self_norm"));
        x = add(x, model_detail::mha(normed, normed, cfg, p, base + ".self", &mask));
        x = add(x, model_detail::mha(rms_norm(x, p.at(base + ".cross_norm")), ctx, cfg, p,
                                     base + ".cross"));
        x = add(x, model_detail::ffn(rms_norm(x, p.at(base + ".ffn_norm")), p, base));
    }
    return matmul(rms_norm(x, p.at("dec.final_norm")), p.at("lm_head"));
}

// Teacher-forced mean log-probability of `a_tokens` (with EOS) given the
// cross-encoded context. Differentiable; loss_gen is its negation.
template <class S>
TensorPtr<S> answer_logprob(const std::vector<int>& q_tokens,
                            const std::vector<NeuralMemoryT<S>>& memories,
                            const std::vector<int>& a_tokens, const ModelConfig& cfg,
                            const ParamsT<S>& p) {
    if (a_tokens.empty()) throw InputError("answer_logprob: empty answer");
    auto q_state = encode_prefix(q_tokens, cfg, p);
    auto ctx = cross_encode(memories, q_state, cfg, p);
    std::vector<int> input{Vocab::kBos};
    input.insert(input.end(), a_tokens.begin(), a_tokens.end());
    std::vector<int> targets(a_tokens);
    targets.push_back(Vocab::kEos);
    if (static_cast<int>(input.size()) > cfg.max_seq) {
        input.resize(static_cast<size_t>(cfg.max_seq));
        targets.resize(static_cast<size_t>(cfg.max_seq));
    }
    return scale(cross_entropy(decoder_logits(ctx.hidden, input, cfg, p), targets, Vocab::kPad),
                 S(-1));
}

namespace model_detail {

template <class S>
using EM = Eigen::Map<Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
template <class S>
using ECM = Eigen::Map<const Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

// Value-only single-row helpers for the incremental decoder.
template <class S>
void rms_row(const std::vector<S>& x, const std::vector<S>& g, std::vector<S>& out) {
    const int d = static_cast<int>(x.size());
    S ms = S(0);
    for (int i = 0; i < d; ++i) ms += x[i] * x[i];
    const S inv = S(1) / std::sqrt(ms / static_cast<S>(d) + static_cast<S>(kRmsNormEps));
    out.resize(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) out[static_cast<size_t>(i)] = x[static_cast<size_t>(i)] * inv * g[static_cast<size_t>(i)];
}

// out[1 x n] = x[1 x d] * W[d x n]
template <class S>
void row_times(const std::vector<S>& x, const TensorPtr<S>& w, std::vector<S>& out) {
    const int d = w->shape[0], n = w->shape[1];
    out.assign(static_cast<size_t>(n), S(0));
    ECM<S> W(w->value.data(), d, n);
    ECM<S> X(x.data(), 1, d);
    EM<S> O(out.data(), 1, n);
    O.noalias() = X * W;
}

// Single-query attention against cached K/V ([rows x d] each, per head).
template <class S>
void attend_cached(const std::vector<S>& q, const std::vector<S>& kcache,
                   const std::vector<S>& vcache, int rows, int d, int n_heads,
                   std::vector<S>& out) {
    const int dh = d / n_heads;
    const S inv_sqrt = static_cast<S>(1.0 / std::sqrt(static_cast<double>(dh)));
    out.assign(static_cast<size_t>(d), S(0));
    std::vector<S> w(static_cast<size_t>(rows));
    for (int h = 0; h < n_heads; ++h) {
        const int off = h * dh;
        S mx = std::numeric_limits<S>::lowest();
        for (int r = 0; r < rows; ++r) {
            S s = S(0);
            const S* krow = kcache.data() + static_cast<int64_t>(r) * d + off;
            for (int i = 0; i < dh; ++i) s += q[static_cast<size_t>(off + i)] * krow[i];
            s *= inv_sqrt;
            w[static_cast<size_t>(r)] = s;
            mx = std::max(mx, s);
        }
        S z = S(0);
        for (int r = 0; r < rows; ++r) {
            w[static_cast<size_t>(r)] = std::exp(w[static_cast<size_t>(r)] - mx);
            z += w[static_cast<size_t>(r)];
        }
        for (int r = 0; r < rows; ++r) {
            const S p = w[static_cast<size_t>(r)] / z;
            const S* vrow = vcache.data() + static_cast<int64_t>(r) * d + off;
            for (int i = 0; i < dh; ++i) out[static_cast<size_t>(off + i)] += p * vrow[i];
        }
    }
}

}  // namespace model_detail

// Greedy argmax decoding with cached cross-attention K/V and incremental
// self-attention K/V. Stops at EOS or max_len; EOS is not returned.
template <class S>
std::vector<int> decode_greedy(const TensorPtr<S>& ctx, const ModelConfig& cfg,
                               const ParamsT<S>& p, int max_len) {
    if (max_len < 1) throw InputError("decode_greedy: max_len must be >= 1");
    using model_detail::attend_cached;
    using model_detail::rms_row;
    using model_detail::row_times;
    const int d = cfg.d_model;
    const int c_rows = ctx->shape[0];

    // per-layer cross K/V computed once per sequence
    std::vector<std::vector<S>> ck(static_cast<size_t>(cfg.L_dec)), cv(static_cast<size_t>(cfg.L_dec));
    for (int i = 0; i < cfg.L_dec; ++i) {
        const std::string base = "dec." + std::to_string(i);
        auto& K = ck[static_cast<size_t>(i)];
        auto& V = cv[static_cast<size_t>(i)];
        K.assign(static_cast<size_t>(c_rows) * d, S(0));
        V.assign(static_cast<size_t>(c_rows) * d, S(0));
        const auto& wk = p.at(base + ".cross.wk");
        const auto& wv = p.at(base + ".cross.wv");
        model_detail::EM<S>(K.data(), c_rows, d).noalias() =
            model_detail::ECM<S>(ctx->value.data(), c_rows, d) *
            model_detail::ECM<S>(wk->value.data(), d, d);
        model_detail::EM<S>(V.data(), c_rows, d).noalias() =
            model_detail::ECM<S>(ctx->value.data(), c_rows, d) *
            model_detail::ECM<S>(wv->value.data(), d, d);
    }

    std::vector<std::vector<S>> sk(static_cast<size_t>(cfg.L_dec)), sv(static_cast<size_t>(cfg.L_dec));
    std::vector<int> out;
    int prev = Vocab::kBos;
    std::vector<S> x(static_cast<size_t>(d)), normed, q, k, v, attn, h1, h2;

    const int steps = std::min(max_len, cfg.max_seq);
    for (int t = 0; t < steps; ++t) {
        const auto& emb = p.at("tok_emb")->value;
        const auto& pos = p.at("pos_dec")->value;
        for (int i = 0; i < d; ++i)
            x[static_cast<size_t>(i)] = emb[static_cast<int64_t>(prev) * d + i] + pos[static_cast<int64_t>(t) * d + i];

        for (int layer = 0; layer < cfg.L_dec; ++layer) {
            const std::string base = "dec." + std::to_string(layer);
            rms_row(x, p.at(base + ".self_norm")->value, normed);
            row_times(normed, p.at(base + ".self.wq"), q);
            row_times(normed, p.at(base + ".self.wk"), k);
            row_times(normed, p.at(base + ".self.wv"), v);
            auto& skl = sk[static_cast<size_t>(layer)];
            auto& svl = sv[static_cast<size_t>(layer)];
            skl.insert(skl.end(), k.begin(), k.end());
            svl.insert(svl.end(), v.begin(), v.end());
            attend_cached(q, skl, svl, t + 1, d, cfg.n_heads, attn);
            row_times(attn, p.at(base + ".self.wo"), h1);
            for (int i = 0; i < d; ++i) x[static_cast<size_t>(i)] += h1[static_cast<size_t>(i)];

            rms_row(x, p.at(base + ".cross_norm")->value, normed);
            row_times(normed, p.at(base + ".cross.wq"), q);
            attend_cached(q, ck[static_cast<size_t>(layer)], cv[static_cast<size_t>(layer)], c_rows, d,
                          cfg.n_heads, attn);
            row_times(attn, p.at(base + ".cross.wo"), h1);
            for (int i = 0; i < d; ++i) x[static_cast<size_t>(i)] += h1[static_cast<size_t>(i)];

            rms_row(x, p.at(base + ".ffn_norm")->value, normed);
            row_times(normed, p.at(base + ".ffn.w1"), h1);
            for (auto& e : h1) e = e > S(0) ? e : S(0);
            row_times(h1, p.at(base + ".ffn.w2"), h2);
            for (int i = 0; i < d; ++i) x[static_cast<size_t>(i)] += h2[static_cast<size_t>(i)];
        }
        rms_row(x, p.at("dec.final_norm")->value, normed);
        row_times(normed, p.at("lm_head"), h1);
        int best = 0;
        for (int i = 1; i < cfg.vocab_size; ++i)
            if (h1[static_cast<size_t>(i)] > h1[static_cast<size_t>(best)]) best = i;
        if (best == Vocab::kEos) break;
        out.push_back(best);
        prev = best;
    }
    return out;
}

template <class S>
std::vector<int> decode_greedy(const CrossEncodedT<S>& ctx, const ModelConfig& cfg,
                               const ParamsT<S>& p, int max_len) {
    return decode_greedy(ctx.hidden, cfg, p, max_len);
}

// Reference decoder without caches; recomputes the full teacher-forced pass
// per step. Used to cross-check the cached path.
template <class S>
std::vector<int> decode_greedy_reference(const TensorPtr<S>& ctx, const ModelConfig& cfg,
                                         const ParamsT<S>& p, int max_len) {
    std::vector<int> input{Vocab::kBos};
    std::vector<int> out;
    const int steps = std::min(max_len, cfg.max_seq);
    for (int t = 0; t < steps; ++t) {
        auto logits = decoder_logits(ctx, input, cfg, p);
        const int v = logits->shape[1];
        const S* row = logits->value.data() + static_cast<int64_t>(t) * v;
        int best = 0;
        for (int i = 1; i < v; ++i)
            if (row[i] > row[best]) best = i;
        if (best == Vocab::kEos) break;
        out.push_back(best);
        input.push_back(best);
    }
    return out;
}

// ---- checkpoint file ("MTTR") ------------------------------------------

namespace model_detail {

template <class T>
void write_pod(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_pod(std::ifstream& in, const char* what) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw FormatError(std::string("checkpoint: truncated ") + what);
    return v;
}

}  // namespace model_detail

template <class S>
void save_checkpoint(const std::string& path, const ModelConfig& cfg, const ParamsT<S>& params) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write checkpoint: " + path);
    out.write("MTTR", 4);
    using model_detail::write_pod;
    write_pod<uint32_t>(out, 1);  // version
    for (int v : {cfg.vocab_size, cfg.d_model, cfg.n_heads, cfg.d_ff, cfg.L_enc, cfg.L_dec, cfg.j,
                  cfg.l, cfg.max_seq})
        write_pod<uint32_t>(out, static_cast<uint32_t>(v));
    write_pod<uint32_t>(out, static_cast<uint32_t>(sizeof(S)));
    write_pod<uint32_t>(out, static_cast<uint32_t>(params.by_name.size()));
    for (const auto& [name, t] : params.by_name) {
        write_pod<uint32_t>(out, static_cast<uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        write_pod<uint32_t>(out, static_cast<uint32_t>(t->shape.size()));
        for (int d : t->shape) write_pod<uint32_t>(out, static_cast<uint32_t>(d));
        out.write(reinterpret_cast<const char*>(t->value.data()),
                  static_cast<std::streamsize>(t->value.size() * sizeof(S)));
    }
    if (!out) throw FormatError("checkpoint: write failed: " + path);
}

struct LoadedCheckpoint {
    ModelConfig config;
    Params params;  // widened to double regardless of stored width
    int float_width = 8;
};

inline LoadedCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open checkpoint: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "MTTR", 4) != 0)
        throw FormatError("checkpoint: bad magic: " + path);
    using model_detail::read_pod;
    if (read_pod<uint32_t>(in, "version") != 1)
        throw FormatError("checkpoint: unsupported version");
    LoadedCheckpoint ck;
    ModelConfig& cfg = ck.config;
    cfg.vocab_size = static_cast<int>(read_pod<uint32_t>(in, "vocab_size"));
    cfg.d_model = static_cast<int>(read_pod<uint32_t>(in, "d_model"));
    cfg.n_heads = static_cast<int>(read_pod<uint32_t>(in, "n_heads"));
    cfg.d_ff = static_cast<int>(read_pod<uint32_t>(in, "d_ff"));
    cfg.L_enc = static_cast<int>(read_pod<uint32_t>(in, "L_enc"));
    cfg.L_dec = static_cast<int>(read_pod<uint32_t>(in, "L_dec"));
    cfg.j = static_cast<int>(read_pod<uint32_t>(in, "j"));
    cfg.l = static_cast<int>(read_pod<uint32_t>(in, "l"));
    cfg.max_seq = static_cast<int>(read_pod<uint32_t>(in, "max_seq"));
    ck.float_width = static_cast<int>(read_pod<uint32_t>(in, "float width"));
    if (ck.float_width != 4 && ck.float_width != 8)
        throw FormatError("checkpoint: unsupported float width");
    const auto n_params = read_pod<uint32_t>(in, "param count");
    for (uint32_t i = 0; i < n_params; ++i) {
        const auto name_len = read_pod<uint32_t>(in, "name length");
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        const auto rank = read_pod<uint32_t>(in, "rank");
        std::vector<int> shape(rank);
        int64_t numel = 1;
        for (auto& dshape : shape) {
            dshape = static_cast<int>(read_pod<uint32_t>(in, "dim"));
            numel *= dshape;
        }
        std::vector<double> data(static_cast<size_t>(numel));
        if (ck.float_width == 8) {
            in.read(reinterpret_cast<char*>(data.data()),
                    static_cast<std::streamsize>(data.size() * sizeof(double)));
        } else {
            std::vector<float> raw(static_cast<size_t>(numel));
            in.read(reinterpret_cast<char*>(raw.data()),
                    static_cast<std::streamsize>(raw.size() * sizeof(float)));
            std::copy(raw.begin(), raw.end(), data.begin());
        }
        if (!in) throw FormatError("checkpoint: truncated parameter block " + name);
        ck.params.add(name, make_tensor<double>(std::move(shape), std::move(data)));
    }
    return ck;
}

inline uint64_t file_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot hash missing file: " + path);
    uint64_t h = 0xcbf29ce484222325ull;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        h = fnv1a64(buf, static_cast<size_t>(in.gcount()), h);
    }
    return h;
}

}  // namespace matter
