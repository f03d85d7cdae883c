#ifndef SIGCLASS_CHECKPOINT_HPP
#define SIGCLASS_CHECKPOINT_HPP

// Self-describing model file.
//
//   magic        8 bytes  "SIGCLSCK"
//   version      u32      (currently 1)
//   d, h, c      u32 x 3  input, hidden and output sizes
//   normalize    u32      1 if feature vectors are max-normalized
//   mask         u32 count, then u32 bin indices
//   labels       u32 count, then (u32 length, bytes) per label
//   layers 1..3  weight (row-major) then bias, f64
//
// All integers and floats are little-endian.

#include "sigclass/dnn.hpp"
#include "sigclass/fuse_select.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace sigclass {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Model {
    DnnParams<double> params;
    FeatureMask mask;
    std::vector<std::string> labels;
    bool normalize_rows = true;
};

void write_checkpoint(std::ostream& os, const Model& model);
Model read_checkpoint(std::istream& is);

void save_checkpoint(const std::filesystem::path& path, const Model& model);
Model load_checkpoint(const std::filesystem::path& path);

} // namespace sigclass

#endif // SIGCLASS_CHECKPOINT_HPP
