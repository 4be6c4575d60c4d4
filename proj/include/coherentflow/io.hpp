#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "coherentflow/clustering.hpp"
#include "coherentflow/coherence.hpp"
#include "coherentflow/detection.hpp"
#include "coherentflow/integrator.hpp"
#include "coherentflow/validation.hpp"

namespace cf {

namespace fs = std::filesystem;

/// CSV with header `particle_id,step,t,x0..x{d-1}`.
void write_ensemble_csv(const Ensemble& ensemble, const fs::path& path);
Ensemble read_ensemble_csv(const fs::path& path);

/// Binary: magic "CFE1", little-endian u32 n, u32 steps, u32 d, f64 t0,
/// f64 dt_out, then f64 positions in particle-major order.
void write_ensemble_binary(const Ensemble& ensemble, const fs::path& path);
Ensemble read_ensemble_binary(const fs::path& path);

/// CSV `particle_id,label`. `ids` defaults to 0..n-1.
void write_labels_csv(const Labeling& labels, const std::vector<std::int64_t>& ids,
                      const fs::path& path);
/// Reads labels, ordering them by `ids` when given (every id must appear).
Labeling read_labels_csv(const fs::path& path, const std::vector<std::int64_t>& ids = {});

/// `eigenvalues.csv`: step,t,rho2_0..rho2_{k-1}.
void write_eigenvalue_trace(const DetectionRun& run, const fs::path& path);
/// `eigenfunctions.csv`: particle_id,f0..f{k-1}.
void write_eigenfunctions(const SpectralResult& spectral, const std::vector<std::int64_t>& ids,
                          const fs::path& path);

/// JSON with method, environment, per_step[], averaged{ri,h,c,v}.
std::string score_report_json(const ScoreReport& report);
ScoreReport parse_score_report_json(const std::string& text);

/// Fixed-width table with one row per report and columns RI, H, V.
std::string score_table(const std::vector<ScoreReport>& reports);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const fs::path& path);

void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

}  // namespace cf
