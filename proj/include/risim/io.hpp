#pragma once

#include <string>
#include <vector>

#include "risim/beamformer.hpp"
#include "risim/forward_model.hpp"
#include "risim/metrics.hpp"
#include "risim/scene.hpp"

namespace risim {

// 8-bit binary PGM, max-normalized. Image rows run top-down in y (iy = ny-1
// first) so letters render upright; columns follow ix.
void write_pgm(const std::string& path, const ReflectivityMap& map);

// Matrix-form CSV in the same orientation as the PGM; values use %.17g.
void write_map_csv(const std::string& path, const ReflectivityMap& map);
ReflectivityMap read_map_csv(const std::string& path);

// One row per subcarrier: config_id, subcarrier_index, frequency_hz, real, imag.
void write_csi_csv(const std::string& path, const CsiMeasurement& csi, const SceneConfig& cfg);

// Complex matrix exchange. A ".csv" path writes rows of re,im pairs; any other
// extension writes the binary layout: "RISH" magic, u64 rows, u64 cols,
// row-major interleaved float64 re/im.
void write_transfer_matrix(const std::string& path, const TransferMatrix& H);
TransferMatrix read_transfer_matrix(const std::string& path);

// Solver trace: iteration, primal_residual, objective.
void write_residuals_csv(const std::string& path, const std::vector<double>& primal_residual,
                         const std::vector<double>& data_objective);

// Columns: scene, method, ris_size, bits, rmse, ssim, config.
void write_results_csv(const std::string& path, const std::vector<MetricReport>& rows,
                       const std::vector<std::string>& config_paths);

// Horizontal strip of max-normalized tiles separated by one white column.
// All maps must share dimensions.
void write_montage_pgm(const std::string& path, const std::vector<ReflectivityMap>& maps);

}  // namespace risim
