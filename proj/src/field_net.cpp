#include "cga/field_net.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

namespace cga {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// mt19937_64 driven uniform with a fixed 53-bit mantissa construction, so the
// stream does not depend on the standard library's distribution internals.
class UniformRng {
public:
    explicit UniformRng(std::uint64_t seed) : gen_(seed) {}
    double next(double lo, double hi) {
        const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
        return lo + u * (hi - lo);
    }

private:
    std::mt19937_64 gen_;
};

struct ForwardTrace {
    std::vector<Eigen::MatrixXd> filters;      // sin(omega x + phi), N x width
    std::vector<Eigen::MatrixXd> activations;  // z_i, N x width
};

ForwardTrace run_forward(const MfnParams& p, const Eigen::MatrixX2d& coords) {
    const int L = p.config.n_layers;
    ForwardTrace t;
    t.filters.reserve(L);
    t.activations.reserve(L);
    for (int i = 0; i < L; ++i) {
        Eigen::MatrixXd arg = coords * p.omega[i].transpose();
        arg.rowwise() += p.phase[i].transpose();
        t.filters.push_back(arg.array().sin().matrix());
        if (i == 0) {
            t.activations.push_back(t.filters[0]);
        } else {
            Eigen::MatrixXd lin = t.activations[i - 1] * p.weights[i - 1].transpose();
            lin.rowwise() += p.biases[i - 1].transpose();
            t.activations.push_back(t.filters[i].cwiseProduct(lin));
        }
    }
    return t;
}

}  // namespace

void MfnConfig::validate() const {
    if (n_layers < 1) throw std::invalid_argument("MfnConfig: n_layers must be >= 1");
    if (width < 1) throw std::invalid_argument("MfnConfig: width must be >= 1");
    if (input_dim != 2) throw std::invalid_argument("MfnConfig: only 2D inputs supported");
    if (outputs < 1) throw std::invalid_argument("MfnConfig: outputs must be >= 1");
    if (bandwidth_x < 0.0 || bandwidth_y < 0.0) {
        throw std::invalid_argument("MfnConfig: bandwidths must be >= 0");
    }
}

MfnParams init_mfn(const MfnConfig& config) {
    config.validate();
    MfnParams p;
    p.config = config;
    UniformRng rng(config.seed);

    const int L = config.n_layers;
    const int w = config.width;
    const int S = config.outputs;
    const double budget_x = kTwoPi * config.bandwidth_x / L;  // rad per unit length
    const double budget_y = kTwoPi * config.bandwidth_y / L;

    p.omega.resize(L);
    p.phase.resize(L);
    for (int i = 0; i < L; ++i) {
        p.omega[i].resize(w, config.input_dim);
        p.phase[i].resize(w);
        for (int r = 0; r < w; ++r) {
            p.omega[i](r, 0) = rng.next(-budget_x, budget_x);
            p.omega[i](r, 1) = rng.next(-budget_y, budget_y);
        }
        for (int r = 0; r < w; ++r) {
            p.phase[i](r) = rng.next(-std::numbers::pi, std::numbers::pi);
        }
    }

    const double hidden_scale = 1.0 / std::sqrt(static_cast<double>(w));
    p.weights.resize(L - 1);
    p.biases.resize(L - 1);
    for (int i = 0; i + 1 < L; ++i) {
        p.weights[i].resize(w, w);
        p.biases[i].resize(w);
        for (int r = 0; r < w; ++r) {
            for (int c = 0; c < w; ++c) {
                p.weights[i](r, c) = rng.next(-hidden_scale, hidden_scale);
            }
        }
        for (int r = 0; r < w; ++r) {
            p.biases[i](r) = rng.next(-hidden_scale, hidden_scale);
        }
    }

    p.w_out = Eigen::MatrixXd::Zero(S, w);
    p.b_out = Eigen::VectorXd::Constant(S, 1.0 / S);
    return p;
}

CompositionField forward(const MfnParams& params, const Eigen::MatrixX2d& coords) {
    ForwardTrace t = run_forward(params, coords);
    Eigen::MatrixXd out = t.activations.back() * params.w_out.transpose();
    out.rowwise() += params.b_out.transpose();
    return out;
}

Eigen::VectorXd backward(const MfnParams& params, const Eigen::MatrixX2d& coords,
                         const Eigen::MatrixXd& dL_drho) {
    const int L = params.config.n_layers;
    const int S = params.config.outputs;
    if (dL_drho.rows() != coords.rows() || dL_drho.cols() != S) {
        throw std::invalid_argument("backward: dL_drho shape mismatch");
    }
    ForwardTrace t = run_forward(params, coords);

    MfnParams grads;
    grads.config = params.config;
    grads.w_out = dL_drho.transpose() * t.activations[L - 1];  // S x width
    grads.b_out = dL_drho.colwise().sum().transpose();

    grads.weights.resize(L - 1);
    grads.biases.resize(L - 1);
    Eigen::MatrixXd dz = dL_drho * params.w_out;  // N x width
    for (int i = L - 1; i >= 1; --i) {
        // z_i = filter_i .* (W_i z_{i-1} + b_i)
        const Eigen::MatrixXd dlin = dz.cwiseProduct(t.filters[i]);
        grads.weights[i - 1] = dlin.transpose() * t.activations[i - 1];
        grads.biases[i - 1] = dlin.colwise().sum().transpose();
        dz = dlin * params.weights[i - 1];
    }
    return trainable_flatten(grads);
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> spatial_jacobian(const MfnParams& params,
                                                             const Eigen::MatrixX2d& coords) {
    const int L = params.config.n_layers;
    const long n = coords.rows();

    std::pair<Eigen::MatrixXd, Eigen::MatrixXd> result;
    Eigen::MatrixXd z, dz_dx, dz_dy;
    for (int i = 0; i < L; ++i) {
        Eigen::MatrixXd arg = coords * params.omega[i].transpose();
        arg.rowwise() += params.phase[i].transpose();
        const Eigen::MatrixXd filter = arg.array().sin().matrix();
        const Eigen::MatrixXd dfilter = arg.array().cos().matrix();
        // d filter / d x_d = cos(arg) * omega(:, d)
        const Eigen::MatrixXd dfx =
            dfilter.array().rowwise() * params.omega[i].col(0).transpose().array();
        const Eigen::MatrixXd dfy =
            dfilter.array().rowwise() * params.omega[i].col(1).transpose().array();
        if (i == 0) {
            z = filter;
            dz_dx = dfx;
            dz_dy = dfy;
        } else {
            Eigen::MatrixXd lin = z * params.weights[i - 1].transpose();
            lin.rowwise() += params.biases[i - 1].transpose();
            const Eigen::MatrixXd dlin_dx = dz_dx * params.weights[i - 1].transpose();
            const Eigen::MatrixXd dlin_dy = dz_dy * params.weights[i - 1].transpose();
            dz_dx = dfx.cwiseProduct(lin) + filter.cwiseProduct(dlin_dx);
            dz_dy = dfy.cwiseProduct(lin) + filter.cwiseProduct(dlin_dy);
            z = filter.cwiseProduct(lin);
        }
    }
    result.first = dz_dx * params.w_out.transpose();
    result.second = dz_dy * params.w_out.transpose();
    if (n == 0) {
        result.first.resize(0, params.config.outputs);
        result.second.resize(0, params.config.outputs);
    }
    return result;
}

int trainable_size(const MfnConfig& config) {
    const int L = config.n_layers;
    const int w = config.width;
    const int S = config.outputs;
    return (L - 1) * (w * w + w) + S * w + S;
}

Eigen::VectorXd trainable_flatten(const MfnParams& params) {
    Eigen::VectorXd flat(trainable_size(params.config));
    long pos = 0;
    auto put_matrix = [&](const Eigen::MatrixXd& m) {
        for (long r = 0; r < m.rows(); ++r)
            for (long c = 0; c < m.cols(); ++c) flat(pos++) = m(r, c);
    };
    for (int i = 0; i + 1 < params.config.n_layers; ++i) {
        put_matrix(params.weights[i]);
        flat.segment(pos, params.biases[i].size()) = params.biases[i];
        pos += params.biases[i].size();
    }
    put_matrix(params.w_out);
    flat.segment(pos, params.b_out.size()) = params.b_out;
    pos += params.b_out.size();
    return flat;
}

void trainable_load(MfnParams& params, const Eigen::VectorXd& flat) {
    if (flat.size() != trainable_size(params.config)) {
        throw std::invalid_argument("trainable_load: flat vector length mismatch");
    }
    long pos = 0;
    auto take_matrix = [&](Eigen::MatrixXd& m) {
        for (long r = 0; r < m.rows(); ++r)
            for (long c = 0; c < m.cols(); ++c) m(r, c) = flat(pos++);
    };
    for (int i = 0; i + 1 < params.config.n_layers; ++i) {
        take_matrix(params.weights[i]);
        params.biases[i] = flat.segment(pos, params.biases[i].size());
        pos += params.biases[i].size();
    }
    take_matrix(params.w_out);
    params.b_out = flat.segment(pos, params.b_out.size());
}

namespace {

constexpr char kCheckpointMagic[8] = {'M', 'F', 'N', 'C', 'K', 'P', 'T', '1'};

void write_exact(std::ofstream& out, const void* data, std::size_t bytes) {
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
}

void read_exact(std::ifstream& in, void* data, std::size_t bytes, const char* what) {
    in.read(static_cast<char*>(data), static_cast<std::streamsize>(bytes));
    if (static_cast<std::size_t>(in.gcount()) != bytes) {
        throw std::runtime_error(std::string("checkpoint: truncated while reading ") + what +
                                 " at offset " + std::to_string(static_cast<long>(in.tellg())));
    }
}

}  // namespace

void save_checkpoint(const MfnParams& params, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("checkpoint: cannot open " + path.string() + " for writing");
    write_exact(out, kCheckpointMagic, sizeof(kCheckpointMagic));
    const std::int32_t header_i[4] = {params.config.n_layers, params.config.width,
                                      params.config.input_dim, params.config.outputs};
    write_exact(out, header_i, sizeof(header_i));
    const double header_d[2] = {params.config.bandwidth_x, params.config.bandwidth_y};
    write_exact(out, header_d, sizeof(header_d));
    const std::uint64_t seed = params.config.seed;
    write_exact(out, &seed, sizeof(seed));

    auto put_matrix = [&](const Eigen::MatrixXd& m) {
        for (long r = 0; r < m.rows(); ++r)
            for (long c = 0; c < m.cols(); ++c) {
                const double v = m(r, c);
                write_exact(out, &v, sizeof(v));
            }
    };
    auto put_vector = [&](const Eigen::VectorXd& v) {
        write_exact(out, v.data(), sizeof(double) * v.size());
    };
    for (int i = 0; i < params.config.n_layers; ++i) {
        put_matrix(params.omega[i]);
        put_vector(params.phase[i]);
    }
    for (int i = 0; i + 1 < params.config.n_layers; ++i) {
        put_matrix(params.weights[i]);
        put_vector(params.biases[i]);
    }
    put_matrix(params.w_out);
    put_vector(params.b_out);
    if (!out) throw std::runtime_error("checkpoint: write failed for " + path.string());
}

MfnParams load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checkpoint: cannot open " + path.string());
    char magic[8];
    read_exact(in, magic, sizeof(magic), "magic");
    if (std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
        throw std::runtime_error("checkpoint: bad magic at offset 0 in " + path.string());
    }
    std::int32_t header_i[4];
    read_exact(in, header_i, sizeof(header_i), "header");
    double header_d[2];
    read_exact(in, header_d, sizeof(header_d), "bandwidths");
    std::uint64_t seed = 0;
    read_exact(in, &seed, sizeof(seed), "seed");

    MfnConfig config;
    config.n_layers = header_i[0];
    config.width = header_i[1];
    config.input_dim = header_i[2];
    config.outputs = header_i[3];
    config.bandwidth_x = header_d[0];
    config.bandwidth_y = header_d[1];
    config.seed = seed;
    config.validate();

    MfnParams p;
    p.config = config;
    auto get_matrix = [&](Eigen::MatrixXd& m, long rows, long cols, const char* what) {
        m.resize(rows, cols);
        for (long r = 0; r < rows; ++r)
            for (long c = 0; c < cols; ++c) {
                double v;
                read_exact(in, &v, sizeof(v), what);
                m(r, c) = v;
            }
    };
    auto get_vector = [&](Eigen::VectorXd& v, long n, const char* what) {
        v.resize(n);
        read_exact(in, v.data(), sizeof(double) * n, what);
    };
    const int L = config.n_layers;
    const int w = config.width;
    p.omega.resize(L);
    p.phase.resize(L);
    for (int i = 0; i < L; ++i) {
        get_matrix(p.omega[i], w, config.input_dim, "omega");
        get_vector(p.phase[i], w, "phase");
    }
    p.weights.resize(L - 1);
    p.biases.resize(L - 1);
    for (int i = 0; i + 1 < L; ++i) {
        get_matrix(p.weights[i], w, w, "weights");
        get_vector(p.biases[i], w, "biases");
    }
    get_matrix(p.w_out, config.outputs, w, "w_out");
    get_vector(p.b_out, config.outputs, "b_out");

    char extra;
    if (in.read(&extra, 1); in.gcount() != 0) {
        throw std::runtime_error("checkpoint: trailing bytes at offset " +
                                 std::to_string(static_cast<long>(in.tellg()) - 1) + " in " +
                                 path.string());
    }
    return p;
}

}  // namespace cga
