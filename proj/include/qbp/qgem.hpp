#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qbp/chimera.hpp"
#include "qbp/code.hpp"
#include "qbp/qubo.hpp"

namespace qbp {

// Geometry of a code laid out on the Chimera lattice. Each Level-I check
// owns a unit cell; Level-II checks each own a 3x3 cell block whose bit
// and ancilla chains run through the idle qubits of the member cells.
struct QgemLayout {
  int lx = 0, ly = 0;   // Level-I region, cells
  int ensembles = 0;    // Level-II check count
  int grid = 0;         // Chimera L this layout targets

  struct Level1 {
    int x = 0, y = 0;
    int bit_a = -1, bit_b = -1, bit_c = -1;  // -1 = slot unused
    bool a_at_b_slot = false;  // odd-ly last row: a sits on the b-left wire
    SchemaType schema = SchemaType::A;
  };
  std::vector<Level1> level1;  // index = check id

  struct Level2 {
    int x0 = 0, y0 = 0;                      // block origin
    int bit_a = -1, bit_b = -1, bit_c = -1;  // roles A, B, C
  };
  std::vector<Level2> level2;  // check id = level1.size() + index
};

struct QgemCode {
  ParityCheckMatrix H;
  QgemLayout layout;
};

// Deterministic structured (2,3)-regular code that embeds exactly on a
// Chimera grid: lx*ly Level-I checks plus `ensembles` Level-II checks.
// Requires lx even; ensembles even (and zero when ly is odd); 3x3 blocks
// must fit in the lx x ly region.
QgemCode build_qgem_code(int lx, int ly, int ensembles);

// Block length achievable with e Level-II ensembles on an lx*ly region:
// N = (3*lx*ly + 3*e) / 2.
int qgem_block_length(int lx, int ly, int ensembles);

struct PlacementResult {
  bool ok = false;
  QgemLayout layout;
  std::vector<int> unplaced_checks;
  std::string diagnostic;
};

// Maps checks to cells. Structured codes are recognized and recovered
// exactly; other codes go through a greedy constraint-driven placement
// that reports the blocking checks when it fails.
PlacementResult place_checks(const ParityCheckMatrix& H, const ChimeraGraph& g);

// Chains for one check embedded into one cell under the given schema:
// [0]=a, [1]=b, [2]=c, [3]=ancilla.
std::vector<std::vector<int>> level1_embed(const ChimeraGraph& g, int x, int y, SchemaType t);

struct EmbedResult {
  ChimeraEmbedding embedding;
  HardwareProblem hardware;
};

// Embeds the assembled objective onto the graph: places checks, builds
// chains, normalizes by |J_F|, splits biases over chains, and verifies.
// Throws std::runtime_error with the placement diagnostic on failure.
EmbedResult embed_code(const QuadraticBinaryProblem& logical, const AncillaPlan& plan,
                       const ParityCheckMatrix& H, const ChimeraGraph& g, double jferro = 8.0);

EmbedResult embed_with_layout(const QuadraticBinaryProblem& logical, const AncillaPlan& plan,
                              const ParityCheckMatrix& H, const ChimeraGraph& g,
                              const QgemLayout& layout, double jferro);

}  // namespace qbp
