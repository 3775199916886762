#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace posemon {

// Shape of the compact encoder. joint_count is fixed at model-build time so
// the fully connected input width is known.
struct NetShape {
    int input_size = 128;
    std::vector<int> conv_channels = {8, 16, 32, 64};
    std::vector<int> fc_sizes = {128, 64};
    int joint_count = 16;

    int extra_inputs() const { return 3 * joint_count + 3; }  // joints + camera
};

// Minimal reverse-mode substrate for the fixed encoder topology:
// 2-channel input -> (3x3 stride-2 conv + ReLU) blocks -> global average pool
// -> concat(features, joints, camera) -> (FC + ReLU) layers -> linear 4-head.
// Templated on the scalar type so gradient checking can run in double while
// the stored model stays single precision.
template <typename T>
class AtomNet {
public:
    explicit AtomNet(const NetShape& shape) : shape_(shape) {
        int s = shape.input_size;
        int c = 2;
        sizes_.push_back(s);
        for (int oc : shape.conv_channels) {
            if (s < 2) throw std::invalid_argument("AtomNet: input too small for conv stack");
            conv_w_off_.push_back(alloc(oc * c * 9));
            conv_b_off_.push_back(alloc(oc));
            s = (s + 1) / 2;
            sizes_.push_back(s);
            c = oc;
        }
        int in = c + shape.extra_inputs();
        for (int out : shape.fc_sizes) {
            fc_w_off_.push_back(alloc(out * in));
            fc_b_off_.push_back(alloc(out));
            in = out;
        }
        head_w_off_ = alloc(4 * in);
        head_b_off_ = alloc(4);
        params.assign(n_params_, T(0));
        grads.assign(n_params_, T(0));
    }

    int param_count() const { return n_params_; }

    std::vector<T> params;
    std::vector<T> grads;

    void zero_grad() { grads.assign(grads.size(), T(0)); }

    // input: flat [2, S, S]; extra: flat [3K + 3].
    std::array<T, 4> forward(const std::vector<T>& input, const std::vector<T>& extra) {
        const int nb = static_cast<int>(shape_.conv_channels.size());
        conv_in_.resize(nb + 1);
        conv_pre_.resize(nb);
        conv_in_[0] = input;
        int c = 2;
        for (int b = 0; b < nb; ++b) {
            conv_forward(b, c, shape_.conv_channels[b], sizes_[b], sizes_[b + 1]);
            c = shape_.conv_channels[b];
        }

        // Global average pool over the last activation.
        const int s = sizes_[nb];
        gap_.assign(c, T(0));
        const std::vector<T>& top = conv_in_[nb];
        for (int ch = 0; ch < c; ++ch) {
            T sum(0);
            for (int i = 0; i < s * s; ++i) sum += top[ch * s * s + i];
            gap_[ch] = sum / T(s * s);
        }

        const int nf = static_cast<int>(shape_.fc_sizes.size());
        fc_in_.resize(nf + 1);
        fc_in_[0] = gap_;
        fc_in_[0].insert(fc_in_[0].end(), extra.begin(), extra.end());
        int in = static_cast<int>(fc_in_[0].size());
        for (int f = 0; f < nf; ++f) {
            int out = shape_.fc_sizes[f];
            fc_in_[f + 1].assign(out, T(0));
            linear_forward(params.data() + fc_w_off_[f], params.data() + fc_b_off_[f],
                           fc_in_[f].data(), fc_in_[f + 1].data(), in, out);
            for (T& v : fc_in_[f + 1]) v = v > T(0) ? v : T(0);
            in = out;
        }
        std::array<T, 4> out{};
        linear_forward(params.data() + head_w_off_, params.data() + head_b_off_,
                       fc_in_[nf].data(), out.data(), in, 4);
        return out;
    }

    // Accumulates parameter gradients; call zero_grad() between batches.
    void backward(const std::array<T, 4>& dout) {
        const int nb = static_cast<int>(shape_.conv_channels.size());
        const int nf = static_cast<int>(shape_.fc_sizes.size());

        int in = static_cast<int>(fc_in_[nf].size());
        std::vector<T> d = std::vector<T>(dout.begin(), dout.end());
        std::vector<T> dprev(in, T(0));
        linear_backward(params.data() + head_w_off_, grads.data() + head_w_off_,
                        grads.data() + head_b_off_, fc_in_[nf].data(), d.data(), dprev.data(), in, 4);
        d = std::move(dprev);
        for (int f = nf - 1; f >= 0; --f) {
            for (size_t i = 0; i < d.size(); ++i)
                if (!(fc_in_[f + 1][i] > T(0))) d[i] = T(0);  // ReLU gate
            in = static_cast<int>(fc_in_[f].size());
            dprev.assign(in, T(0));
            linear_backward(params.data() + fc_w_off_[f], grads.data() + fc_w_off_[f],
                            grads.data() + fc_b_off_[f], fc_in_[f].data(), d.data(), dprev.data(),
                            in, static_cast<int>(d.size()));
            d = std::move(dprev);
        }

        // Split: first channels came from the pool, the rest from extra inputs.
        const int c = shape_.conv_channels[nb - 1];
        const int s = sizes_[nb];
        std::vector<T> dtop(static_cast<size_t>(c) * s * s, T(0));
        for (int ch = 0; ch < c; ++ch) {
            T g = d[ch] / T(s * s);
            for (int i = 0; i < s * s; ++i) dtop[ch * s * s + i] = g;
        }

        for (int b = nb - 1; b >= 0; --b) {
            int ic = b == 0 ? 2 : shape_.conv_channels[b - 1];
            dtop = conv_backward(b, ic, shape_.conv_channels[b], sizes_[b], sizes_[b + 1], dtop);
        }
    }

    void init_params(std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        const int nb = static_cast<int>(shape_.conv_channels.size());
        int c = 2;
        for (int b = 0; b < nb; ++b) {
            int oc = shape_.conv_channels[b];
            double std_dev = std::sqrt(2.0 / (c * 9));
            for (int i = 0; i < oc * c * 9; ++i) params[conv_w_off_[b] + i] = T(gauss(rng) * std_dev);
            for (int i = 0; i < oc; ++i) params[conv_b_off_[b] + i] = T(0);
            c = oc;
        }
        int in = c + shape_.extra_inputs();
        for (size_t f = 0; f < shape_.fc_sizes.size(); ++f) {
            int out = shape_.fc_sizes[f];
            double std_dev = std::sqrt(2.0 / in);
            for (int i = 0; i < out * in; ++i) params[fc_w_off_[f] + i] = T(gauss(rng) * std_dev);
            for (int i = 0; i < out; ++i) params[fc_b_off_[f] + i] = T(0);
            in = out;
        }
        double std_dev = std::sqrt(1.0 / in);
        for (int i = 0; i < 4 * in; ++i) params[head_w_off_ + i] = T(gauss(rng) * std_dev);
        for (int i = 0; i < 4; ++i) params[head_b_off_ + i] = T(0);
    }

private:
    int alloc(int n) {
        int off = n_params_;
        n_params_ += n;
        return off;
    }

    static void linear_forward(const T* w, const T* b, const T* x, T* y, int in, int out) {
        for (int o = 0; o < out; ++o) {
            T sum = b[o];
            const T* row = w + static_cast<size_t>(o) * in;
            for (int i = 0; i < in; ++i) sum += row[i] * x[i];
            y[o] = sum;
        }
    }

    static void linear_backward(const T* w, T* gw, T* gb, const T* x, const T* dy, T* dx, int in,
                                int out) {
        for (int o = 0; o < out; ++o) {
            T g = dy[o];
            gb[o] += g;
            const T* row = w + static_cast<size_t>(o) * in;
            T* grow = gw + static_cast<size_t>(o) * in;
            for (int i = 0; i < in; ++i) {
                grow[i] += g * x[i];
                dx[i] += g * row[i];
            }
        }
    }

    // 3x3, stride 2, pad 1. Stores the pre-ReLU output and applies ReLU into
    // the next stage's input buffer.
    void conv_forward(int b, int ic, int oc, int si, int so) {
        const std::vector<T>& x = conv_in_[b];
        std::vector<T>& z = conv_pre_[b];
        z.assign(static_cast<size_t>(oc) * so * so, T(0));
        const T* w = params.data() + conv_w_off_[b];
        const T* bias = params.data() + conv_b_off_[b];
        for (int o = 0; o < oc; ++o)
            for (int oy = 0; oy < so; ++oy)
                for (int ox = 0; ox < so; ++ox) {
                    T sum = bias[o];
                    for (int i = 0; i < ic; ++i)
                        for (int ky = 0; ky < 3; ++ky) {
                            int iy = 2 * oy + ky - 1;
                            if (iy < 0 || iy >= si) continue;
                            for (int kx = 0; kx < 3; ++kx) {
                                int ix = 2 * ox + kx - 1;
                                if (ix < 0 || ix >= si) continue;
                                sum += w[((o * ic + i) * 3 + ky) * 3 + kx] *
                                       x[(static_cast<size_t>(i) * si + iy) * si + ix];
                            }
                        }
                    z[(static_cast<size_t>(o) * so + oy) * so + ox] = sum;
                }
        std::vector<T>& a = conv_in_[b + 1];
        a.resize(z.size());
        for (size_t i = 0; i < z.size(); ++i) a[i] = z[i] > T(0) ? z[i] : T(0);
    }

    std::vector<T> conv_backward(int b, int ic, int oc, int si, int so, std::vector<T>& da) {
        // da is the gradient at the post-ReLU activation.
        const std::vector<T>& z = conv_pre_[b];
        for (size_t i = 0; i < da.size(); ++i)
            if (!(z[i] > T(0))) da[i] = T(0);
        const std::vector<T>& x = conv_in_[b];
        std::vector<T> dx(static_cast<size_t>(ic) * si * si, T(0));
        const T* w = params.data() + conv_w_off_[b];
        T* gw = grads.data() + conv_w_off_[b];
        T* gb = grads.data() + conv_b_off_[b];
        for (int o = 0; o < oc; ++o)
            for (int oy = 0; oy < so; ++oy)
                for (int ox = 0; ox < so; ++ox) {
                    T g = da[(static_cast<size_t>(o) * so + oy) * so + ox];
                    if (g == T(0)) continue;
                    gb[o] += g;
                    for (int i = 0; i < ic; ++i)
                        for (int ky = 0; ky < 3; ++ky) {
                            int iy = 2 * oy + ky - 1;
                            if (iy < 0 || iy >= si) continue;
                            for (int kx = 0; kx < 3; ++kx) {
                                int ix = 2 * ox + kx - 1;
                                if (ix < 0 || ix >= si) continue;
                                size_t xi = (static_cast<size_t>(i) * si + iy) * si + ix;
                                gw[((o * ic + i) * 3 + ky) * 3 + kx] += g * x[xi];
                                dx[xi] += g * w[((o * ic + i) * 3 + ky) * 3 + kx];
                            }
                        }
                }
        return dx;
    }

    NetShape shape_;
    std::vector<int> sizes_;  // spatial size before each block, then final
    std::vector<int> conv_w_off_, conv_b_off_, fc_w_off_, fc_b_off_;
    int head_w_off_ = 0, head_b_off_ = 0;
    int n_params_ = 0;

    // forward workspace
    std::vector<std::vector<T>> conv_in_;   // activations entering each block
    std::vector<std::vector<T>> conv_pre_;  // pre-ReLU conv outputs
    std::vector<T> gap_;
    std::vector<std::vector<T>> fc_in_;     // activations entering each fc layer
};

}  // namespace posemon
