// Copyright 2026 The mcmppi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mcmppi/vae.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <utility>

#include "binary_io.h"
#include "mcmppi/kinematics.h"

namespace mcmppi {
namespace {

constexpr char kParamsMagic[8] = {'M', 'C', 'M', 'P', 'V', 'A', 'E', '0'};
constexpr std::uint32_t kParamsVersion = 1;
constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEpsilon = 1e-8;

DenseLayer GlorotLayer(int in, int out, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / (in + out));
  std::uniform_real_distribution<double> u(-limit, limit);
  DenseLayer layer;
  layer.w.resize(out, in);
  for (int c = 0; c < in; ++c) {
    for (int r = 0; r < out; ++r) layer.w(r, c) = u(rng);
  }
  layer.b = Eigen::MatrixXd::Zero(out, 1);
  return layer;
}

// y = w x + b. Batched decoding evaluates columns one at a time through this
// same routine, so single and batched results agree bit for bit.
void DenseForward(const DenseLayer& layer, const double* x, double* y) {
  const Eigen::Index out = layer.w.rows();
  const Eigen::Index in = layer.w.cols();
  Eigen::Map<Eigen::VectorXd> ym(y, out);
  ym = layer.b.col(0);
  ym.noalias() += layer.w * Eigen::Map<const Eigen::VectorXd>(x, in);
}

// tanh through the vectorized exponential: sign(y) (1 - e) / (1 + e) with
// e = exp(-2|y|). Absolute error stays near machine epsilon.
void TanhInPlace(double* y, int size, double* scratch) {
  Eigen::Map<Eigen::ArrayXd> a(y, size);
  Eigen::Map<Eigen::ArrayXd> e(scratch, size);
  e = (-2.0 * a.abs()).exp();
  a = a.sign() * (1.0 - e) / (1.0 + e);
}

int MaxWidth(const VaeParams& p) {
  int w = std::max(p.input_dim, p.latent_dim);
  for (int h : p.hidden) w = std::max(w, h);
  return w;
}

Eigen::VectorXd Normalize(const VaeParams& p, const Eigen::VectorXd& q) {
  return (2.0 * (q - p.lower).array() / (p.upper - p.lower).array() - 1.0).matrix();
}

Eigen::MatrixXd NormalizeBatch(const VaeParams& p, const Eigen::MatrixXd& q) {
  const Eigen::ArrayXd scale = 2.0 / (p.upper - p.lower).array();
  return ((q.colwise() - p.lower).array().colwise() * scale - 1.0).matrix();
}

void DecodeInto(const VaeParams& p, const double* z, double* q, double* a,
                double* b, double* scratch) {
  const int layers = static_cast<int>(p.decoder.size());
  const double* in = z;
  for (int k = 0; k + 1 < layers; ++k) {
    DenseForward(p.decoder[k], in, a);
    TanhInPlace(a, static_cast<int>(p.decoder[k].w.rows()), scratch);
    in = a;
    std::swap(a, b);
  }
  DenseForward(p.decoder.back(), in, q);
  for (int j = 0; j < p.input_dim; ++j) {
    q[j] = p.lower[j] + 0.5 * (q[j] + 1.0) * (p.upper[j] - p.lower[j]);
  }
}

void CheckShape(const VaeParams& p) {
  if (p.input_dim <= 0 || p.latent_dim <= 0 || p.hidden.empty() ||
      p.lower.size() != p.input_dim || p.upper.size() != p.input_dim ||
      p.encoder.size() != p.hidden.size() ||
      p.decoder.size() != p.hidden.size() + 1) {
    throw FileFormatError("inconsistent VAE layer layout");
  }
}

// Adam moments in the same layout as the parameters.
struct AdamState {
  std::vector<Eigen::MatrixXd> m;
  std::vector<Eigen::MatrixXd> v;
  long long step = 0;
};

}  // namespace

std::vector<Eigen::MatrixXd*> VaeParams::Tensors() {
  std::vector<Eigen::MatrixXd*> out;
  for (DenseLayer& l : encoder) {
    out.push_back(&l.w);
    out.push_back(&l.b);
  }
  for (DenseLayer* l : {&mean_head, &logvar_head}) {
    out.push_back(&l->w);
    out.push_back(&l->b);
  }
  for (DenseLayer& l : decoder) {
    out.push_back(&l.w);
    out.push_back(&l.b);
  }
  return out;
}

std::vector<const Eigen::MatrixXd*> VaeParams::Tensors() const {
  std::vector<const Eigen::MatrixXd*> out;
  for (Eigen::MatrixXd* t : const_cast<VaeParams*>(this)->Tensors()) out.push_back(t);
  return out;
}

int VaeParams::ParameterCount() const {
  int count = 0;
  for (const Eigen::MatrixXd* t : Tensors()) count += static_cast<int>(t->size());
  return count;
}

VaeParams InitVae(const ChainModel& model, const VaeArchitecture& arch,
                  std::uint64_t seed) {
  if (arch.hidden.empty()) throw TrainingError("VAE needs a hidden layer", 0);
  for (int h : arch.hidden) {
    if (h <= 0) throw TrainingError("VAE hidden widths must be positive", 0);
  }
  VaeParams p;
  p.input_dim = model.joint_count();
  p.latent_dim = model.manifold_dim();
  p.hidden = arch.hidden;
  p.beta = arch.beta;
  p.lower = model.lower();
  p.upper = model.upper();
  p.meta.seed = seed;
  p.meta.model_id = model.id();
  std::mt19937_64 rng(seed);
  int in = p.input_dim;
  for (int h : p.hidden) {
    p.encoder.push_back(GlorotLayer(in, h, rng));
    in = h;
  }
  p.mean_head = GlorotLayer(in, p.latent_dim, rng);
  p.logvar_head = GlorotLayer(in, p.latent_dim, rng);
  in = p.latent_dim;
  for (auto it = p.hidden.rbegin(); it != p.hidden.rend(); ++it) {
    p.decoder.push_back(GlorotLayer(in, *it, rng));
    in = *it;
  }
  p.decoder.push_back(GlorotLayer(in, p.input_dim, rng));
  return p;
}

LossTerms VaeLoss(const VaeParams& p, const Eigen::MatrixXd& q,
                  const Eigen::MatrixXd& eps, VaeParams* grad) {
  const int batch = static_cast<int>(q.cols());
  const int n = p.input_dim;
  const int enc = static_cast<int>(p.encoder.size());
  const int dec = static_cast<int>(p.decoder.size());

  // Forward pass, keeping every activation.
  std::vector<Eigen::MatrixXd> ea(enc + 1);
  ea[0] = NormalizeBatch(p, q);
  for (int k = 0; k < enc; ++k) {
    ea[k + 1] = ((p.encoder[k].w * ea[k]).colwise() + p.encoder[k].b.col(0))
                    .array()
                    .tanh()
                    .matrix();
  }
  const Eigen::MatrixXd mu =
      (p.mean_head.w * ea[enc]).colwise() + p.mean_head.b.col(0);
  const Eigen::MatrixXd logvar =
      (p.logvar_head.w * ea[enc]).colwise() + p.logvar_head.b.col(0);
  const Eigen::ArrayXXd sigma = (0.5 * logvar.array()).exp();
  std::vector<Eigen::MatrixXd> da(dec);
  da[0] = (mu.array() + sigma * eps.array()).matrix();
  for (int k = 0; k + 1 < dec; ++k) {
    da[k + 1] = ((p.decoder[k].w * da[k]).colwise() + p.decoder[k].b.col(0))
                    .array()
                    .tanh()
                    .matrix();
  }
  const Eigen::MatrixXd out =
      (p.decoder.back().w * da[dec - 1]).colwise() + p.decoder.back().b.col(0);

  const Eigen::MatrixXd diff = out - ea[0];
  LossTerms terms;
  terms.recon = diff.squaredNorm() / (static_cast<double>(n) * batch);
  terms.kl = 0.5 *
             (mu.array().square() + logvar.array().exp() - 1.0 - logvar.array()).sum() /
             batch;
  terms.loss = terms.recon + p.beta * terms.kl;
  if (grad == nullptr) return terms;

  // Backward pass.
  *grad = p;
  Eigen::MatrixXd d_out = (2.0 / (static_cast<double>(n) * batch)) * diff;
  Eigen::MatrixXd delta = d_out;
  for (int k = dec - 1; k >= 0; --k) {
    grad->decoder[k].w = delta * da[k].transpose();
    grad->decoder[k].b = delta.rowwise().sum();
    Eigen::MatrixXd back = p.decoder[k].w.transpose() * delta;
    if (k > 0) {
      delta = (back.array() * (1.0 - da[k].array().square())).matrix();
    } else {
      delta = std::move(back);  // d loss / d z
    }
  }
  const double kl_scale = p.beta / batch;
  const Eigen::MatrixXd d_mu = delta + kl_scale * mu;
  const Eigen::MatrixXd d_logvar =
      (delta.array() * eps.array() * 0.5 * sigma +
       kl_scale * 0.5 * (logvar.array().exp() - 1.0))
          .matrix();
  grad->mean_head.w = d_mu * ea[enc].transpose();
  grad->mean_head.b = d_mu.rowwise().sum();
  grad->logvar_head.w = d_logvar * ea[enc].transpose();
  grad->logvar_head.b = d_logvar.rowwise().sum();
  Eigen::MatrixXd back =
      p.mean_head.w.transpose() * d_mu + p.logvar_head.w.transpose() * d_logvar;
  for (int k = enc - 1; k >= 0; --k) {
    delta = (back.array() * (1.0 - ea[k + 1].array().square())).matrix();
    grad->encoder[k].w = delta * ea[k].transpose();
    grad->encoder[k].b = delta.rowwise().sum();
    if (k > 0) back = p.encoder[k].w.transpose() * delta;
  }
  return terms;
}

VaeParams TrainVae(const ChainModel& model, const ManifoldDataset& dataset,
                   const VaeArchitecture& arch, const TrainOptions& options,
                   std::vector<EpochStats>* history) {
  if (dataset.size() == 0) throw TrainingError("empty dataset", 0);
  if (dataset.dim() != model.joint_count()) {
    throw TrainingError("dataset does not match the model", 0);
  }
  if (options.batch_size < 1 || options.epochs < 0) {
    throw TrainingError("invalid training options", 0);
  }
  VaeParams p = InitVae(model, arch, options.seed);
  p.meta.dataset_hash = dataset.Hash();
  p.meta.model_id = dataset.model_id;
  // Separate stream from the initialization so zero epochs touch nothing.
  std::mt19937_64 rng(options.seed ^ 0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> normal;

  std::vector<Eigen::MatrixXd*> tensors = p.Tensors();
  AdamState adam;
  for (const Eigen::MatrixXd* t : tensors) {
    adam.m.push_back(Eigen::MatrixXd::Zero(t->rows(), t->cols()));
    adam.v.push_back(Eigen::MatrixXd::Zero(t->rows(), t->cols()));
  }
  const int count = dataset.size();
  std::vector<int> order(count);
  std::iota(order.begin(), order.end(), 0);
  VaeParams grad;
  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    EpochStats stats;
    stats.epoch = epoch;
    for (int start = 0; start < count; start += options.batch_size) {
      const int b = std::min(options.batch_size, count - start);
      Eigen::MatrixXd q(p.input_dim, b);
      for (int i = 0; i < b; ++i) q.col(i) = dataset.samples.col(order[start + i]);
      Eigen::MatrixXd eps(p.latent_dim, b);
      for (int c = 0; c < b; ++c) {
        for (int r = 0; r < p.latent_dim; ++r) eps(r, c) = normal(rng);
      }
      const LossTerms terms = VaeLoss(p, q, eps, &grad);
      if (!std::isfinite(terms.loss)) {
        throw TrainingError("training diverged at epoch " + std::to_string(epoch),
                            epoch);
      }
      stats.loss += terms.loss * b;
      stats.recon += terms.recon * b;
      stats.kl += terms.kl * b;
      ++adam.step;
      const double c1 = 1.0 - std::pow(kAdamBeta1, adam.step);
      const double c2 = 1.0 - std::pow(kAdamBeta2, adam.step);
      const std::vector<Eigen::MatrixXd*> g = grad.Tensors();
      for (std::size_t t = 0; t < tensors.size(); ++t) {
        adam.m[t] = kAdamBeta1 * adam.m[t] + (1.0 - kAdamBeta1) * *g[t];
        adam.v[t] = kAdamBeta2 * adam.v[t] +
                    (1.0 - kAdamBeta2) * g[t]->cwiseProduct(*g[t]);
        *tensors[t] -= (options.learning_rate * (adam.m[t].array() / c1) /
                        ((adam.v[t].array() / c2).sqrt() + kAdamEpsilon))
                           .matrix();
      }
    }
    stats.loss /= count;
    stats.recon /= count;
    stats.kl /= count;
    p.meta.epochs = epoch;
    p.meta.final_loss = stats.loss;
    p.meta.final_recon = stats.recon;
    p.meta.final_kl = stats.kl;
    if (history != nullptr) history->push_back(stats);
  }
  double bound = 0.0;
  for (int i = 0; i < count; ++i) {
    const Configuration q = dataset.samples.col(i);
    bound = std::max(bound, (Decode(p, EncodeMean(p, q)) - q).cwiseAbs().maxCoeff());
  }
  p.meta.recon_bound = bound;
  return p;
}

Configuration Decode(const VaeParams& p, const LatentState& z) {
  const int width = MaxWidth(p);
  Eigen::VectorXd a(width), b(width), scratch(width);
  Configuration q(p.input_dim);
  DecodeInto(p, z.data(), q.data(), a.data(), b.data(), scratch.data());
  return q;
}

Eigen::MatrixXd DecodeBatch(const VaeParams& p, const Eigen::MatrixXd& z) {
  const int width = MaxWidth(p);
  Eigen::VectorXd a(width), b(width), scratch(width);
  Eigen::MatrixXd q(p.input_dim, z.cols());
  for (int t = 0; t < z.cols(); ++t) {
    DecodeInto(p, z.col(t).data(), q.col(t).data(), a.data(), b.data(),
               scratch.data());
  }
  return q;
}

LatentState EncodeMean(const VaeParams& p, const Configuration& q) {
  const int width = MaxWidth(p);
  Eigen::VectorXd a = Normalize(p, q);
  Eigen::VectorXd b(width), scratch(width);
  for (const DenseLayer& layer : p.encoder) {
    b.resize(layer.w.rows());
    DenseForward(layer, a.data(), b.data());
    TanhInPlace(b.data(), static_cast<int>(b.size()), scratch.data());
    std::swap(a, b);
  }
  LatentState z(p.latent_dim);
  DenseForward(p.mean_head, a.data(), z.data());
  return z;
}

void SaveParams(const VaeParams& p, const std::string& path) {
  CheckShape(p);
  internal::BinaryWriter w;
  w.Put<std::uint32_t>(p.input_dim);
  w.Put<std::uint32_t>(p.latent_dim);
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(p.hidden.size()));
  for (int h : p.hidden) w.Put<std::uint32_t>(h);
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(p.activation));
  w.Put<double>(p.beta);
  w.Put<std::int32_t>(p.meta.epochs);
  w.Put<double>(p.meta.final_loss);
  w.Put<double>(p.meta.final_recon);
  w.Put<double>(p.meta.final_kl);
  w.Put<double>(p.meta.recon_bound);
  w.Put<std::uint64_t>(p.meta.dataset_hash);
  w.Put<std::uint64_t>(p.meta.seed);
  w.PutString(p.meta.model_id);
  w.PutMatrix(p.lower.transpose());
  w.PutMatrix(p.upper.transpose());
  for (const Eigen::MatrixXd* t : p.Tensors()) w.PutMatrix(*t);
  internal::WriteContainer(path, kParamsMagic, kParamsVersion, w.bytes());
}

VaeParams LoadParams(const std::string& path) {
  const std::vector<char> payload =
      internal::ReadContainer(path, kParamsMagic, kParamsVersion);
  internal::BinaryReader r(payload.data(), payload.size());
  VaeParams p;
  p.input_dim = static_cast<int>(r.Get<std::uint32_t>());
  p.latent_dim = static_cast<int>(r.Get<std::uint32_t>());
  const auto layers = r.Get<std::uint32_t>();
  if (p.input_dim < 1 || p.input_dim > 4096 || p.latent_dim < 1 ||
      p.latent_dim > 4096 || layers < 1 || layers > 64) {
    throw FileFormatError("implausible VAE sizes in '" + path + "'");
  }
  for (std::uint32_t i = 0; i < layers; ++i) {
    const auto h = r.Get<std::uint32_t>();
    if (h < 1 || h > 65536) throw FileFormatError("implausible hidden width");
    p.hidden.push_back(static_cast<int>(h));
  }
  if (r.Get<std::uint32_t>() != static_cast<std::uint32_t>(Activation::kTanh)) {
    throw FileFormatError("unknown activation in '" + path + "'");
  }
  p.beta = r.Get<double>();
  p.meta.epochs = r.Get<std::int32_t>();
  p.meta.final_loss = r.Get<double>();
  p.meta.final_recon = r.Get<double>();
  p.meta.final_kl = r.Get<double>();
  p.meta.recon_bound = r.Get<double>();
  p.meta.dataset_hash = r.Get<std::uint64_t>();
  p.meta.seed = r.Get<std::uint64_t>();
  p.meta.model_id = r.GetString();
  p.lower = r.GetMatrix(1, p.input_dim).transpose();
  p.upper = r.GetMatrix(1, p.input_dim).transpose();
  int in = p.input_dim;
  for (int h : p.hidden) {
    p.encoder.push_back({Eigen::MatrixXd(h, in), Eigen::MatrixXd(h, 1)});
    in = h;
  }
  p.mean_head = {Eigen::MatrixXd(p.latent_dim, in), Eigen::MatrixXd(p.latent_dim, 1)};
  p.logvar_head = p.mean_head;
  in = p.latent_dim;
  for (auto it = p.hidden.rbegin(); it != p.hidden.rend(); ++it) {
    p.decoder.push_back({Eigen::MatrixXd(*it, in), Eigen::MatrixXd(*it, 1)});
    in = *it;
  }
  p.decoder.push_back({Eigen::MatrixXd(p.input_dim, in), Eigen::MatrixXd(p.input_dim, 1)});
  for (Eigen::MatrixXd* t : p.Tensors()) {
    *t = r.GetMatrix(static_cast<int>(t->rows()), static_cast<int>(t->cols()));
  }
  if (!r.done()) throw FileFormatError("trailing bytes in '" + path + "'");
  CheckShape(p);
  return p;
}

LearnedDecoder::LearnedDecoder(VaeParams params) : params_(std::move(params)) {
  CheckShape(params_);
}

Configuration LearnedDecoder::Decode(const LatentState& z) const {
  return ::mcmppi::Decode(params_, z);
}

Eigen::MatrixXd LearnedDecoder::DecodeBatch(const Eigen::MatrixXd& z) const {
  return ::mcmppi::DecodeBatch(params_, z);
}

LatentState LearnedDecoder::Encode(const Configuration& q) const {
  return EncodeMean(params_, q);
}

double PriorMismatch(const ChainModel& model, const ManifoldDecoder& decoder,
                     int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double total = 0.0;
  LatentState z(decoder.latent_dim());
  for (int i = 0; i < count; ++i) {
    for (int j = 0; j < z.size(); ++j) z(j) = normal(rng);
    double h;
    try {
      h = Constraint(model, decoder.Decode(z)).norm();
    } catch (const GeometryError&) {
      h = M_PI;
    }
    total += h;
  }
  return total / count;
}

}  // namespace mcmppi
