#include "pair_cache.hpp"

#include <bit>
#include <cstdio>
#include <cstring>

#include "permqfi/error.hpp"
#include "permqfi/evolution.hpp"

namespace permqfi::cli {

namespace {

// 64-bit FNV-1a; stable across platforms, unlike std::hash
class Fnv1a {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001b3ULL;
    }
  }
  void text(const std::string& s) {
    const std::uint64_t n = s.size();
    bytes(&n, sizeof n);
    bytes(s.data(), s.size());
  }
  void number(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    bytes(&bits, sizeof bits);
  }
  void integer(std::uint64_t v) { bytes(&v, sizeof v); }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

}  // namespace

PairCache::PairCache(std::filesystem::path dir, std::uint64_t limit_bytes)
    : dir_(std::move(dir)), limit_bytes_(limit_bytes) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create cache directory " + dir_.string());
}

std::string PairCache::key(const ProbeSpec& probe, const SimParams& params, const PipelineOptions& options) {
  const SimParams p = dimensionless_rescale(params);
  Fnv1a h;
  h.text(version_string());
  h.text(probe.name());
  h.integer(static_cast<std::uint64_t>(p.num_qubits));
  for (double v : {p.kappa, p.gamma, p.omega_q, p.omega_c, options.qfi.delta}) h.number(v);
  const IntegratorConfig& c = options.integrator;
  for (double v : {c.rtol, c.atol, c.first_step, c.max_step, c.safety, c.min_factor, c.max_factor}) h.number(v);
  h.integer(c.max_steps);
  h.integer(options.times.size());
  for (double t : options.times) h.number(t);

  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h.value()));
  return probe.name() + "_N" + std::to_string(p.num_qubits) + "_" + buf;
}

std::filesystem::path PairCache::path_for(const std::string& key) const { return dir_ / (key + ".pqt"); }

std::optional<PairTrajectory> PairCache::load(const ProbeSpec& probe, const SimParams& params,
                                              const PipelineOptions& options) {
  const auto path = path_for(key(probe, params, options));
  if (!std::filesystem::exists(path)) {
    ++misses_;
    return std::nullopt;
  }
  try {
    PairTrajectory pair = read_pair_trajectory(path);
    // a hash collision or a stale file must not be replayed silently
    if (pair.delta != options.qfi.delta || pair.plus.times != options.times) {
      ++misses_;
      return std::nullopt;
    }
    ++hits_;
    return pair;
  } catch (const Error&) {
    ++misses_;
    return std::nullopt;
  }
}

bool PairCache::accepts(std::size_t support_size, std::size_t samples) const {
  const double bytes = 2.0 * static_cast<double>(support_size) * static_cast<double>(samples) * sizeof(Complex);
  return bytes <= static_cast<double>(limit_bytes_);
}

void PairCache::save(const ProbeSpec& probe, const SimParams& params, const PipelineOptions& options,
                     const PairTrajectory& pair) {
  write_pair_trajectory(path_for(key(probe, params, options)), pair);
  ++stores_;
}

}  // namespace permqfi::cli
