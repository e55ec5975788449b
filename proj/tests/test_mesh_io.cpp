#include "support.hpp"

#include <gtest/gtest.h>

using namespace entrofv;
using testing_support::two_cell_mesh;

namespace {

std::string strip_annotations(const std::string& text)
{
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t end = text.find('\n', pos);
    const std::string line = text.substr(pos, end - pos);
    if (line.rfind("#@", 0) != 0) out += line + "\n";
    pos = end == std::string::npos ? text.size() : end + 1;
  }
  return out;
}

const char* const two_cells = R"(tpfa 1
# two rectangles
cells 2
0 0.5 0.25 0.5
1 0.5 0.75 0.5
edges 3
0 1 0.5 I 0 1 0.25 0.25
1 1 0.25 D 0 0.25
2 1 0.25 N 1 0.25   # right side
xi 0.5
)";

}  // namespace

TEST(MeshIo, RoundTripPreservesGraphAndGeometry)
{
  const Mesh mesh = reference_mesh(1, BoundarySpec::unit_square(BoundarySpec::Left | BoundarySpec::Bottom));
  const Mesh back = load_mesh(save_mesh(mesh));
  EXPECT_TRUE(same_graph(mesh, back, 0.0));
  ASSERT_TRUE(back.has_geometry());
  EXPECT_TRUE(same_graph(refine(back), refine(mesh), 0.0));
  EXPECT_EQ(save_mesh(back), save_mesh(mesh));
}

TEST(MeshIo, RoundTripWithoutAnnotationsKeepsTheGraph)
{
  const Mesh mesh = reference_mesh(0, BoundarySpec::unit_square(15));
  const Mesh back = load_mesh(strip_annotations(save_mesh(mesh)));
  EXPECT_FALSE(back.has_geometry());
  EXPECT_TRUE(same_graph(mesh, back, 0.0));
  EXPECT_TRUE(validate(back).ok());
  EXPECT_THROW(refine(back), GeometryError);
}

TEST(MeshIo, ReadsHandWrittenFile)
{
  const Mesh mesh = load_mesh(two_cells);
  ASSERT_EQ(mesh.num_cells(), 2u);
  ASSERT_EQ(mesh.num_edges(), 3u);
  EXPECT_DOUBLE_EQ(mesh.edge(0).transmissibility, 2.0);
  EXPECT_DOUBLE_EQ(mesh.edge(1).transmissibility, 4.0);
  EXPECT_EQ(mesh.edge(2).tag, EdgeTag::Neumann);
  EXPECT_EQ(mesh.cell(0).edges, (std::vector<Index>{0, 1}));
  EXPECT_EQ(mesh.cell(1).edges, (std::vector<Index>{0, 2}));
  EXPECT_DOUBLE_EQ(mesh.domain_measure(), 1.0);
  EXPECT_TRUE(validate(mesh).ok());
}

TEST(MeshIo, MissingCellIsReportedWithTheEdge)
{
  std::string text = two_cells;
  text.replace(text.find("0 1 0.5 I 0 1"), 13, "0 1 0.5 I 0 7");
  try {
    load_mesh(text);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("edge 0"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("cell 7"), std::string::npos) << e.what();
  }
}

TEST(MeshIo, EmptyInputIsAParseError)
{
  EXPECT_THROW(load_mesh(""), ParseError);
  EXPECT_THROW(load_mesh("# only a comment\n\n"), ParseError);
}

TEST(MeshIo, MalformedNumberReportsItsLine)
{
  std::string text = two_cells;
  text.replace(text.find("0.75"), 4, "0.7x");
  try {
    load_mesh(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 5u);
  }
}

TEST(MeshIo, TagDeterminesCellCount)
{
  std::string text = two_cells;
  text.replace(text.find("1 1 0.25 D 0 0.25"), 17, "1 1 0.25 I 0 0.25");
  EXPECT_THROW(load_mesh(text), DataError);
}

TEST(MeshIo, UnknownTagAndBadHeaderAreParseErrors)
{
  std::string text = two_cells;
  text.replace(text.find(" N "), 3, " Q ");
  EXPECT_THROW(load_mesh(text), ParseError);
  EXPECT_THROW(load_mesh(std::string("tpfa 2\n") + (two_cells + 7)), ParseError);
}

TEST(MeshIo, TruncatedFileIsAParseError)
{
  std::string text = two_cells;
  text.erase(text.find("xi"));
  EXPECT_THROW(load_mesh(text), ParseError);
}

TEST(MeshIo, TwoCellMeshRoundTrip)
{
  const Mesh mesh = two_cell_mesh();
  EXPECT_TRUE(same_graph(mesh, load_mesh(save_mesh(mesh)), 0.0));
}
