#pragma once

#include <filesystem>
#include <vector>

#include "ensreg/contour.hpp"
#include "ensreg/types.hpp"

namespace ensreg {

/// Formats a real with 9 fixed decimals, the project-wide CSV convention.
std::string csv_real(double v);

// All writers sort rows by (y, x, k/value), print reals with csv_real and
// write atomically (temp file + rename).
void write_csv(const ScalarField& field, const std::filesystem::path& path);
void write_csv(const PosteriorField& post, const std::filesystem::path& path);
void write_csv(const ScalarEnsembleField& field, const std::filesystem::path& path);
void write_csv(const LabelEnsembleField& field, const std::filesystem::path& path);
void write_csv(const VectorEnsembleField& field, const std::filesystem::path& path);

/// Rows: level,contour,point,x,y,closed — in extraction order.
void write_contours_csv(const std::vector<ContourSet>& sets,
                        const std::filesystem::path& path);

/// Reads "x,y,k,p" rows back into a PosteriorField; checks completeness and
/// per-voxel unity-sum.
PosteriorField read_posterior_csv(const std::filesystem::path& path);

/// Reads "x,y,value,weight" rows back into a scalar ensemble; every voxel
/// must carry at least one atom and unit total weight.
ScalarEnsembleField read_scalar_ensemble_csv(const std::filesystem::path& path);

} // namespace ensreg
