#pragma once

#include <geofuse/mesh.hpp>

#include <filesystem>
#include <optional>

namespace geofuse {

enum class MeshFormat { off, obj, ply };

/// Guess the format from the file extension; nullopt when unknown.
std::optional<MeshFormat> format_from_extension(const std::filesystem::path& path);

///
/// Read a triangle mesh with optional per-vertex color.
///
/// Supported: OFF/COFF, OBJ with the `v x y z r g b` extension, and PLY
/// (ascii or binary_little_endian) with optional red/green/blue vertex
/// properties. 8-bit colors are scaled to [0,1] and tagged sRGB. PLY files
/// carrying float `L a b` vertex properties are read as Lab colors.
/// Polygons with more than three corners are fan-triangulated.
///
/// Throws ParseError (line or byte location) or ValidationError.
///
TexturedMesh load_mesh(const std::filesystem::path& path, std::optional<MeshFormat> format_hint = {});

struct SaveOptions
{
    /// Optional per-vertex scalar written as a `value` property (PLY only).
    const Eigen::VectorXd* scalar_field = nullptr;
};

/// Write a mesh. sRGB colors are quantized to 8 bits; Lab colors are
/// written as double `L a b` properties (PLY only).
void save_mesh(
    const TexturedMesh& mesh,
    const std::filesystem::path& path,
    std::optional<MeshFormat> format_hint = {},
    const SaveOptions& options = {});

} // namespace geofuse
