#include "berlab/model.hpp"

#include <cfenv>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "berlab/rng.hpp"

namespace berlab {

ModelParams::ModelParams(double delta_, double sigma2_)
    : delta(delta_), sigma2(sigma2_) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("ModelParams: delta must be positive");
  }
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw std::invalid_argument("ModelParams: sigma2 must be positive");
  }
}

ModelParams ModelParams::from_snr_db(double delta_, double snr_db_) {
  if (!std::isfinite(snr_db_)) {
    throw std::invalid_argument("ModelParams: snr_db must be finite");
  }
  return ModelParams(delta_, std::pow(10.0, -snr_db_ / 10.0));
}

double ModelParams::snr_db() const { return 10.0 * std::log10(1.0 / sigma2); }

int rows_for(double delta, int n) {
  if (n < 1) {
    throw std::invalid_argument("rows_for: n must be >= 1");
  }
  // nearbyint under the default FE_TONEAREST mode rounds ties to even.
  const double m = std::nearbyint(delta * static_cast<double>(n));
  if (!(m >= 1.0) || m > 1e9) {
    throw std::invalid_argument("rows_for: round(delta*n) out of range");
  }
  return static_cast<int>(m);
}

Instance gen_instance(const ModelParams& params, int n, std::uint64_t seed,
                      std::uint64_t trial_index) {
  const int m = rows_for(params.delta, n);
  Instance inst;
  inst.n = n;
  inst.m = m;
  inst.sigma2 = params.sigma2;

  CounterRng signs(seed, trial_index, stream_tag(Stream::kSignBits));
  inst.x0.resize(n);
  for (int j = 0; j < n; ++j) {
    inst.x0[j] = (signs.bits(static_cast<std::uint64_t>(j)) >> 63) ? -1.0 : 1.0;
  }

  CounterRng chan(seed, trial_index, stream_tag(Stream::kChannel));
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  inst.channel.resize(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::uint64_t idx =
          static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(n) +
          static_cast<std::uint64_t>(j);
      inst.channel(i, j) = scale * chan.normal(idx);
    }
  }

  CounterRng noise(seed, trial_index, stream_tag(Stream::kNoise));
  inst.noise.resize(m);
  for (int i = 0; i < m; ++i) {
    inst.noise[i] = noise.normal(static_cast<std::uint64_t>(i));
  }

  inst.y = inst.channel * inst.x0 + std::sqrt(params.sigma2) * inst.noise;
  return inst;
}

DetectionResult ber_of(const Eigen::VectorXd& x_hat,
                       const Eigen::VectorXd& x0) {
  if (x_hat.size() != x0.size() || x0.size() == 0) {
    throw std::invalid_argument("ber_of: length mismatch");
  }
  DetectionResult res;
  res.x_hat = x_hat;
  for (Eigen::Index i = 0; i < x0.size(); ++i) {
    if (x_hat[i] != x0[i]) {
      ++res.errors;
    }
  }
  res.ber = static_cast<double>(res.errors) / static_cast<double>(x0.size());
  return res;
}

namespace {

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    arr.push_back(v[i]);
  }
  return arr;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& arr) {
  Eigen::VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  }
  return v;
}

}  // namespace

std::string instance_to_json(const Instance& inst) {
  nlohmann::json j;
  j["n"] = inst.n;
  j["m"] = inst.m;
  j["sigma2"] = inst.sigma2;
  nlohmann::json chan = nlohmann::json::array();
  for (int i = 0; i < inst.m; ++i) {
    for (int k = 0; k < inst.n; ++k) {
      chan.push_back(inst.channel(i, k));
    }
  }
  j["channel"] = std::move(chan);
  j["x0"] = vector_to_json(inst.x0);
  j["noise"] = vector_to_json(inst.noise);
  j["y"] = vector_to_json(inst.y);
  return j.dump();
}

Instance instance_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("instance_from_json: ") + e.what());
  }
  Instance inst;
  try {
    inst.n = j.at("n").get<int>();
    inst.m = j.at("m").get<int>();
    inst.sigma2 = j.at("sigma2").get<double>();
    const auto& chan = j.at("channel");
    if (inst.n < 1 || inst.m < 1 ||
        chan.size() != static_cast<std::size_t>(inst.m) *
                           static_cast<std::size_t>(inst.n)) {
      throw std::invalid_argument("instance_from_json: bad dimensions");
    }
    inst.channel.resize(inst.m, inst.n);
    std::size_t pos = 0;
    for (int i = 0; i < inst.m; ++i) {
      for (int k = 0; k < inst.n; ++k) {
        inst.channel(i, k) = chan[pos++].get<double>();
      }
    }
    inst.x0 = vector_from_json(j.at("x0"));
    inst.noise = vector_from_json(j.at("noise"));
    inst.y = vector_from_json(j.at("y"));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("instance_from_json: ") + e.what());
  }
  if (inst.x0.size() != inst.n || inst.noise.size() != inst.m ||
      inst.y.size() != inst.m) {
    throw std::invalid_argument("instance_from_json: bad array lengths");
  }
  return inst;
}

}  // namespace berlab
