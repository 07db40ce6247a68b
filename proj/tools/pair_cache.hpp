#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <string>

#include "permqfi/metrology.hpp"

namespace permqfi::cli {

/// On-disk store of g +/- delta/2 pair trajectories, one file per run key.
///
/// The key hashes everything the stored states depend on: probe, N,
/// dimensionless rates, delta, integrator settings, the time grid and the
/// code version. QFI thresholds are left out since they only act on the
/// stored states afterwards.
class PairCache final : public PairStore {
 public:
  PairCache(std::filesystem::path dir, std::uint64_t limit_bytes);

  static std::string key(const ProbeSpec& probe, const SimParams& params, const PipelineOptions& options);
  std::filesystem::path path_for(const std::string& key) const;

  std::optional<PairTrajectory> load(const ProbeSpec& probe, const SimParams& params,
                                     const PipelineOptions& options) override;
  bool accepts(std::size_t support_size, std::size_t samples) const override;
  void save(const ProbeSpec& probe, const SimParams& params, const PipelineOptions& options,
            const PairTrajectory& pair) override;

  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }
  std::size_t stores() const { return stores_; }

 private:
  std::filesystem::path dir_;
  std::uint64_t limit_bytes_;
  std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> misses_{0};
  std::atomic<std::size_t> stores_{0};
};

}  // namespace permqfi::cli
