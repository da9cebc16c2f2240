#include <geofuse/color.hpp>
#include <geofuse/embedding.hpp>
#include <geofuse/error.hpp>

namespace geofuse {

Colors colors_as_lab(const TexturedMesh& mesh)
{
    const Colors& c = mesh.colors();
    if (mesh.colorspace() == ColorSpace::lab) return c;
    Colors lab(c.rows(), 3);
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
        lab.row(i) = srgb_to_lab(c.row(i).transpose()).transpose();
    }
    return lab;
}

namespace {

Colors colors_as_srgb(const TexturedMesh& mesh)
{
    const Colors& c = mesh.colors();
    if (mesh.colorspace() == ColorSpace::srgb) return c;
    Colors rgb(c.rows(), 3);
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
        rgb.row(i) = lab_to_srgb(c.row(i).transpose()).transpose();
    }
    return rgb;
}

} // namespace

JointEmbedding build_embedding(const TexturedMesh& mesh, double eta, const EmbeddingOptions& options)
{
    if (!(eta >= 0.0)) throw InvalidArgument("eta must be nonnegative");
    if (!(options.color_scale > 0.0)) throw InvalidArgument("color_scale must be positive");
    if (eta > 0.0 && !mesh.has_colors()) {
        throw InvalidArgument("eta > 0 requires per-vertex colors");
    }

    JointEmbedding emb;
    emb.eta = eta;
    emb.coords = EmbeddingCoords::Zero(mesh.num_vertices(), 6);
    emb.coords.leftCols<3>() = mesh.vertices();
    if (eta > 0.0) {
        const Colors photometric =
            options.space == PhotometricSpace::lab ? colors_as_lab(mesh) : colors_as_srgb(mesh);
        emb.coords.rightCols<3>() = (eta / options.color_scale) * photometric;
    }
    return emb;
}

} // namespace geofuse
