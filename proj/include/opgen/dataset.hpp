// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "opgen/field_sampler.hpp"
#include "opgen/grid.hpp"
#include "opgen/pde_operators.hpp"

namespace opgen {

inline constexpr int kManifestVersion = 1;

enum class Precision { F32, F64 };

std::string_view dtype_name(Precision p);  // "float32" / "float64"
std::size_t element_size(Precision p);
Precision precision_from_bits(int bits);

/// Categorized dataset failure. The category string is what the CLI prints.
class DatasetError : public std::runtime_error {
public:
    enum class Kind { Io, MissingArrayFile, ShapeMismatch, UnknownVersion, InvalidManifest };

    DatasetError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    Kind kind() const { return kind_; }
    std::string_view category() const;

private:
    Kind kind_;
};

/// One generated sample. Grids are resolution x resolution, row-major with
/// the x index slowest. alpha/delta are present for the parametric family.
struct SampleRecord {
    std::uint64_t index = 0;
    int truncation = 0;
    BoundaryCondition bc = BoundaryCondition::Dirichlet;
    OperatorFamily family = OperatorFamily::Poisson;
    std::array<double, 4> matrix_params{};
    std::vector<double> f;
    std::vector<double> u;
    std::optional<std::vector<double>> alpha;
    std::optional<std::vector<double>> delta;

    friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

struct ArrayEntry {
    std::string name;
    std::string file;
    std::string dtype;  // float32 | float64 | int32
    std::vector<std::uint64_t> shape;

    std::uint64_t element_count() const;
    std::size_t element_bytes() const;
};

struct DatasetManifest {
    int version = kManifestVersion;
    OperatorFamily family = OperatorFamily::Poisson;
    BoundaryCondition bc = BoundaryCondition::Dirichlet;
    std::size_t resolution = 64;
    bool includes_boundary = true;
    std::uint64_t n_samples = 0;
    int m_min = 1;
    int m_max = 20;
    std::uint64_t master_seed = 0;
    Precision precision = Precision::F32;
    std::vector<ArrayEntry> arrays;
    std::string status = "complete";
    std::string created_utc;

    Grid grid() const { return Grid(resolution, includes_boundary); }
    FieldSpec field_spec() const { return {bc, m_min, m_max, master_seed}; }
    const ArrayEntry* find_array(std::string_view name) const;

    /// Serialized JSON text. `with_timestamp = false` omits created_utc.
    std::string to_json(bool with_timestamp = true) const;
    /// Throws DatasetError(UnknownVersion / InvalidManifest).
    static DatasetManifest from_json(std::string_view text);
};

/// Produces the field for a sample index. Defaults to sample_field.
using FieldSource = std::function<RandomField(const FieldSpec&, std::uint64_t)>;

struct GenerateOptions {
    FieldSpec spec;
    OperatorFamily family = OperatorFamily::Poisson;
    Grid grid{64};
    std::uint64_t n_samples = 1;
    Precision precision = Precision::F32;
    std::filesystem::path out_dir;
    unsigned workers = 0;  ///< 0 = hardware concurrency
    bool write_npy = false;
    FieldSource field_source;  ///< test hook; empty = sample_field
    std::size_t batch_size = 256;
};

/// Builds one sample in 64-bit precision. `evaluator` must be built for the
/// record grid and the spec's boundary condition with m_max >= spec.m_max.
SampleRecord make_sample_record(const GenerateOptions& opts, const TensorEvaluator& evaluator,
                                std::uint64_t index);

/// Generates N samples into opts.out_dir: one raw little-endian array file per
/// tensor plus manifest.json, optionally .npy mirrors. Output bytes depend only
/// on the options, never on the worker count. On failure every file this call
/// created is removed and the error rethrown.
DatasetManifest generate_dataset(const GenerateOptions& opts);

/// Random-access reader over a generated dataset.
class DatasetReader {
public:
    /// Validates version, presence and byte length of every array file.
    explicit DatasetReader(const std::filesystem::path& manifest_path);

    const DatasetManifest& manifest() const { return manifest_; }
    const std::filesystem::path& directory() const { return dir_; }
    std::uint64_t size() const { return manifest_.n_samples; }

    /// Values are widened to double; float32 data round-trips exactly.
    SampleRecord read(std::uint64_t index) const;

    template <class Fn>
    void for_each(Fn&& fn) const {
        for (std::uint64_t k = 0; k < size(); ++k) fn(read(k));
    }

private:
    std::vector<double> read_slab(const ArrayEntry& entry, std::uint64_t index) const;

    std::filesystem::path dir_;
    DatasetManifest manifest_;
};

/// Writes `values` as a little-endian .npy (format 1.0) file.
void write_npy(const std::filesystem::path& path, std::string_view descr,
               const std::vector<std::uint64_t>& shape, std::span<const char> raw_bytes);
/// Builds a .npy mirror of an existing raw array file.
void write_npy_mirror(const std::filesystem::path& raw_path, const std::filesystem::path& npy_path,
                      const ArrayEntry& entry);

}  // namespace opgen
