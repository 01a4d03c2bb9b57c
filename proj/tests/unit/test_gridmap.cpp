#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "safeplan/gridmap.hpp"
#include "test_support.hpp"

using namespace safeplan;

namespace {

OccupancyGrid from_ascii(const std::string& text)
{
    std::istringstream in(text);
    return load_ascii_map(in);
}

OccupancyGrid random_grid(std::mt19937_64& rng, int w, int h, double fill)
{
    std::bernoulli_distribution occ(fill);
    OccupancyGrid g(w, h, 0.1, {-0.3, 0.2});
    for (int iy = 0; iy < h; ++iy)
        for (int ix = 0; ix < w; ++ix)
            g.set_occupied({ix, iy}, occ(rng));
    return g;
}

// Cells met by the segment, from the sorted crossings of grid lines: the
// midpoint of each sub-interval lies strictly inside one cell.
std::set<std::size_t> crossed_cells(const OccupancyGrid& g, Point2 p, Point2 q)
{
    const double r = g.resolution();
    const Point2 o = g.origin();
    const double x0 = (p.x - o.x) / r, y0 = (p.y - o.y) / r;
    const double x1 = (q.x - o.x) / r, y1 = (q.y - o.y) / r;
    std::vector<double> ts{0.0, 1.0};
    for (int k = 0; k <= g.width(); ++k)
        if (x1 != x0) {
            const double t = (k - x0) / (x1 - x0);
            if (t > 0 && t < 1)
                ts.push_back(t);
        }
    for (int k = 0; k <= g.height(); ++k)
        if (y1 != y0) {
            const double t = (k - y0) / (y1 - y0);
            if (t > 0 && t < 1)
                ts.push_back(t);
        }
    std::sort(ts.begin(), ts.end());
    std::set<std::size_t> cells;
    auto add = [&](double t) {
        const int ix = std::clamp(static_cast<int>(std::floor(x0 + t * (x1 - x0))), 0, g.width() - 1);
        const int iy = std::clamp(static_cast<int>(std::floor(y0 + t * (y1 - y0))), 0, g.height() - 1);
        cells.insert(g.index({ix, iy}));
    };
    add(0.0);
    add(1.0);
    for (std::size_t k = 0; k + 1 < ts.size(); ++k)
        add(0.5 * (ts[k] + ts[k + 1]));
    return cells;
}

bool oracle_free(const OccupancyGrid& g, Point2 p, Point2 q)
{
    for (const auto idx : crossed_cells(g, p, q))
        if (g.cells()[idx])
            return false;
    return true;
}

}  // namespace

TEST(GridLoad, CenterCellOccupied)
{
    const auto g = from_ascii("3 3 0.5 0 0\n...\n.#.\n...\n");
    EXPECT_EQ(g.width(), 3);
    EXPECT_EQ(g.height(), 3);
    EXPECT_EQ(g.occupied_count(), 1u);
    EXPECT_TRUE(g.occupied({1, 1}));
}

TEST(GridLoad, FirstBodyLineIsTopRow)
{
    const auto g = from_ascii("2 2 1 0 0\n#.\n..\n");
    EXPECT_TRUE(g.occupied({0, 1}));
    EXPECT_FALSE(g.occupied({0, 0}));
}

TEST(GridLoad, EmptyMapRejected)
{
    try {
        from_ascii("0 0 0.1 0 0\n");
        FAIL() << "expected MapError";
    } catch (const MapError& e) {
        EXPECT_STREQ(e.what(), "empty map");
    }
}

TEST(GridLoad, MalformedInputsRejected)
{
    EXPECT_THROW(from_ascii("3 2 0.1 0 0\n...\n"), MapError);        // too few rows
    EXPECT_THROW(from_ascii("3 1 0.1 0 0\n....\n"), MapError);       // row too long
    EXPECT_THROW(from_ascii("2 1 0.1 0 0\n.x\n"), MapError);         // bad cell
    EXPECT_THROW(from_ascii("2 1 -0.1 0 0\n..\n"), MapError);        // resolution
    EXPECT_THROW(from_ascii("2 1 0.1 0\n..\n"), MapError);           // short header
    EXPECT_THROW(OccupancyGrid(2, 2, 0.1, {}, std::vector<std::uint8_t>(3)), MapError);
}

TEST(GridLoad, PgmWithSidecarThreshold)
{
    std::istringstream pgm("P2\n# comment\n3 2\n255\n0 127 128\n255 200 10\n");
    std::istringstream meta("resolution = 0.25\norigin_x = 1\norigin_y = -2\n");
    const auto m = parse_map_metadata(meta);
    const auto g = load_pgm_map(pgm, m);
    EXPECT_DOUBLE_EQ(g.resolution(), 0.25);
    EXPECT_DOUBLE_EQ(g.origin().x, 1.0);
    // first pixel row is the top row; value < maxval/2 is occupied
    EXPECT_TRUE(g.occupied({0, 1}));
    EXPECT_TRUE(g.occupied({1, 1}));
    EXPECT_FALSE(g.occupied({2, 1}));
    EXPECT_FALSE(g.occupied({0, 0}));
    EXPECT_FALSE(g.occupied({1, 0}));
    EXPECT_TRUE(g.occupied({2, 0}));
}

TEST(GridLoad, PgmBinaryRejected)
{
    std::istringstream pgm("P5\n1 1\n255\n");
    EXPECT_THROW(load_pgm_map(pgm, {0.1, {}}), MapError);
}

TEST(GridLoad, AsciiRoundTrip)
{
    std::mt19937_64 rng(3);
    const auto g = random_grid(rng, 17, 9, 0.3);
    std::stringstream s;
    write_ascii_map(s, g);
    EXPECT_EQ(load_ascii_map(s), g);
}

TEST(GridLoad, FixtureCountsMatchPolygonAreas)
{
    // 2 m x 2 m square at 0.05 m cells
    EXPECT_EQ(load_map(test::fixture("rectangle.txt")).occupied_count(), 40u * 40u);
    // L-shape: 2.5 x 1.25 bar plus 1.25 x 1.25 upright
    EXPECT_EQ(load_map(test::fixture("lshape.txt")).occupied_count(), 50u * 25u + 25u * 25u);
}

TEST(GridCoords, WorldCellRoundTrip)
{
    const OccupancyGrid g(20, 10, 0.1, {-1.0, 2.0});
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ux(-0.999, 0.999), uy(2.001, 2.999);
    for (int k = 0; k < 1000; ++k) {
        const Point2 p{ux(rng), uy(rng)};
        const auto c = g.world_to_cell(p);
        ASSERT_TRUE(c.has_value());
        EXPECT_EQ(g.world_to_cell(g.cell_center(*c)), c);
    }
    EXPECT_FALSE(g.world_to_cell({1.0, 2.5}).has_value());
    EXPECT_FALSE(g.world_to_cell({-1.01, 2.5}).has_value());
}

TEST(Inflate, ZeroIsIdentity)
{
    std::mt19937_64 rng(1);
    const auto g = random_grid(rng, 30, 20, 0.1);
    EXPECT_EQ(inflate(g, 0.0), g);
}

TEST(Inflate, NegativeRejected)
{
    const OccupancyGrid g(4, 4, 0.1);
    EXPECT_THROW(inflate(g, -0.01), std::invalid_argument);
}

TEST(Inflate, SingleCellOneWidthGivesPlus)
{
    OccupancyGrid g(9, 9, 0.1);
    g.set_occupied({4, 4}, true);
    const auto out = inflate(g, 0.1);
    EXPECT_EQ(out.occupied_count(), 5u);
    EXPECT_TRUE(out.occupied({4, 5}));
    EXPECT_FALSE(out.occupied({5, 5}));
}

TEST(Inflate, MatchesBruteForceDistance)
{
    std::mt19937_64 rng(11);
    const auto g = random_grid(rng, 25, 18, 0.03);
    for (const double ds : {0.05, 0.14, 0.2, 0.31}) {
        const auto out = inflate(g, ds);
        for (int iy = 0; iy < g.height(); ++iy)
            for (int ix = 0; ix < g.width(); ++ix) {
                bool expect = false;
                for (int jy = 0; jy < g.height() && !expect; ++jy)
                    for (int jx = 0; jx < g.width() && !expect; ++jx)
                        expect = g.occupied({jx, jy}) &&
                                 distance(g.cell_center({ix, iy}), g.cell_center({jx, jy})) <=
                                     ds + 1e-12;
                ASSERT_EQ(out.occupied({ix, iy}), expect) << ix << "," << iy << " ds=" << ds;
            }
    }
}

TEST(Inflate, MonotoneInRadius)
{
    std::mt19937_64 rng(2);
    const auto g = random_grid(rng, 40, 30, 0.02);
    const auto a = inflate(g, 0.12);
    const auto b = inflate(g, 0.27);
    for (std::size_t k = 0; k < a.cells().size(); ++k) {
        if (g.cells()[k])
            EXPECT_TRUE(a.cells()[k]);
        if (a.cells()[k])
            EXPECT_TRUE(b.cells()[k]);
    }
}

TEST(Inflate, FreeGridStaysFree)
{
    const OccupancyGrid g(30, 30, 0.05);
    EXPECT_EQ(inflate(g, 0.2).occupied_count(), 0u);
}

TEST(SampleLabels, Labels)
{
    OccupancyGrid free_grid(10, 10, 0.1);
    for (const auto& s : sample_labels(free_grid, 0.1))
        EXPECT_EQ(s.label, 1);
    OccupancyGrid full(10, 10, 0.1, {}, std::vector<std::uint8_t>(100, 1));
    for (const auto& s : sample_labels(full, 0.1))
        EXPECT_EQ(s.label, 0);
}

TEST(SampleLabels, HalfOccupiedCountsMatchCells)
{
    OccupancyGrid g(12, 8, 0.1);
    for (int iy = 0; iy < 8; ++iy)
        for (int ix = 0; ix < 6; ++ix)
            g.set_occupied({ix, iy}, true);
    const auto samples = sample_labels(g, 0.1);
    ASSERT_EQ(samples.size(), 96u);
    const auto zeros = std::count_if(samples.begin(), samples.end(),
                                     [](const LabeledSample& s) { return s.label == 0; });
    EXPECT_EQ(static_cast<std::size_t>(zeros), g.occupied_count());
}

TEST(SampleLabels, LatticeGeometry)
{
    const OccupancyGrid g(100, 60, 0.05, {1.0, -1.0});
    for (const double spacing : {0.05, 0.07, 0.3, 1.1}) {
        const auto s = sample_labels(g, spacing);
        const auto nx = static_cast<std::size_t>(std::floor(5.0 / spacing + 1e-9));
        const auto ny = static_cast<std::size_t>(std::floor(3.0 / spacing + 1e-9));
        ASSERT_EQ(s.size(), nx * ny) << spacing;
        EXPECT_NEAR(s.front().position.x, 1.0 + spacing / 2, 1e-12);
        EXPECT_NEAR(s.front().position.y, -1.0 + spacing / 2, 1e-12);
        for (const auto& p : s)
            EXPECT_TRUE(g.bounds().contains(p.position));
    }
    EXPECT_THROW(sample_labels(g, 0.0), std::invalid_argument);
    EXPECT_THROW(sample_labels(g, 3.5), std::invalid_argument);
}

TEST(Regions, FreeMapHasNone)
{
    EXPECT_TRUE(partition_regions(OccupancyGrid(10, 10, 0.1)).empty());
}

TEST(Regions, DiagonalContactMerges)
{
    const auto g = from_ascii("4 4 1 0 0\n....\n.#..\n..#.\n....\n");
    EXPECT_EQ(partition_regions(g).size(), 1u);
}

TEST(Regions, ThreeObstacleFixture)
{
    const auto g = load_map(test::fixture("three_obstacles.txt"));
    EXPECT_EQ(partition_regions(g).size(), 3u);
    EXPECT_EQ(partition_regions(inflate(g, 0.2)).size(), 3u);
}

TEST(Regions, PartitionMatchesFloodFill)
{
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const auto g = random_grid(rng, 23, 17, 0.35);
        const auto regions = partition_regions(g);

        // oracle: repeated relaxation of labels to the minimum 8-neighbor label
        const int w = g.width(), h = g.height();
        std::vector<int> label(g.cells().size(), -1);
        for (std::size_t k = 0; k < label.size(); ++k)
            if (g.cells()[k])
                label[k] = static_cast<int>(k);
        for (bool changed = true; changed;) {
            changed = false;
            for (int iy = 0; iy < h; ++iy)
                for (int ix = 0; ix < w; ++ix) {
                    const auto k = g.index({ix, iy});
                    if (label[k] < 0)
                        continue;
                    for (int dy = -1; dy <= 1; ++dy)
                        for (int dx = -1; dx <= 1; ++dx) {
                            const CellIndex n{ix + dx, iy + dy};
                            if (!g.in_grid(n) || label[g.index(n)] < 0)
                                continue;
                            if (label[g.index(n)] < label[k]) {
                                label[k] = label[g.index(n)];
                                changed = true;
                            }
                        }
                }
        }
        std::set<int> roots;
        for (const int l : label)
            if (l >= 0)
                roots.insert(l);
        ASSERT_EQ(regions.size(), roots.size());

        std::vector<int> seen(label.size(), 0);
        for (const auto& r : regions) {
            ASSERT_FALSE(r.cells.empty());
            EXPECT_TRUE(std::is_sorted(r.cells.begin(), r.cells.end()));
            const int root = label[r.cells.front()];
            for (const auto c : r.cells) {
                EXPECT_TRUE(g.cells()[c]);
                EXPECT_EQ(label[c], root);
                ++seen[c];
            }
        }
        for (std::size_t k = 0; k < seen.size(); ++k)
            EXPECT_EQ(seen[k], g.cells()[k] ? 1 : 0);
    }
}

TEST(Regions, BoundingBoxCoversCells)
{
    const auto g = load_map(test::fixture("rectangle.txt"));
    const auto regions = partition_regions(g);
    ASSERT_EQ(regions.size(), 1u);
    const Rect& b = regions[0].bounding_box;
    EXPECT_NEAR(b.min_x, 4.0, 1e-9);
    EXPECT_NEAR(b.min_y, 3.0, 1e-9);
    EXPECT_NEAR(b.max_x, 6.0, 1e-9);
    EXPECT_NEAR(b.max_y, 5.0, 1e-9);
}

TEST(Segment, BasicCases)
{
    const auto g = from_ascii("5 5 1 0 0\n.....\n.....\n..#..\n.....\n.....\n");
    EXPECT_TRUE(segment_collision_free(g, {0.5, 0.5}, {0.5, 0.5}));
    EXPECT_FALSE(segment_collision_free(g, {2.5, 2.5}, {2.5, 2.5}));
    EXPECT_FALSE(segment_collision_free(g, {0.5, 2.5}, {4.5, 2.5}));
    EXPECT_TRUE(segment_collision_free(g, {0.5, 1.5}, {4.5, 1.5}));
    EXPECT_THROW(segment_collision_free(g, {-0.1, 1.0}, {1.0, 1.0}), MapError);
    EXPECT_THROW(segment_collision_free(g, {1.0, 1.0}, {1.0, 5.1}), MapError);
}

TEST(Segment, ExactCornerCrossingIsConservative)
{
    // passes exactly through the corner shared by (1,1), (2,1), (1,2), (2,2)
    const auto g = from_ascii("4 4 1 0 0\n....\n....\n.#..\n....\n");
    EXPECT_FALSE(segment_collision_free(g, {0.5, 2.5}, {2.5, 0.5}));
}

TEST(Segment, MatchesSupercoverOracle)
{
    std::mt19937_64 rng(17);
    int blocked = 0;
    for (int trial = 0; trial < 3000; ++trial) {
        const auto g = random_grid(rng, 15, 12, 0.08);
        const Rect b = g.bounds();
        std::uniform_real_distribution<double> ux(b.min_x, b.max_x - 1e-9), uy(b.min_y, b.max_y - 1e-9);
        const Point2 p{ux(rng), uy(rng)}, q{ux(rng), uy(rng)};
        const bool got = segment_collision_free(g, p, q);
        ASSERT_EQ(got, oracle_free(g, p, q)) << "trial " << trial;
        ASSERT_EQ(got, segment_collision_free(g, q, p));
        blocked += got ? 0 : 1;
    }
    EXPECT_GT(blocked, 100);
}

TEST(Segment, FreeImpliesHalfResolutionSamplesFree)
{
    std::mt19937_64 rng(23);
    const auto g = inflate(load_map(test::fixture("three_obstacles.txt")), 0.2);
    std::uniform_real_distribution<double> ux(0.0, 9.999), uy(0.0, 7.999);
    for (int trial = 0; trial < 2000; ++trial) {
        const Point2 p{ux(rng), uy(rng)};
        const Point2 q{p.x + std::uniform_real_distribution<double>(-1, 1)(rng),
                       p.y + std::uniform_real_distribution<double>(-1, 1)(rng)};
        if (!g.bounds().contains(q))
            continue;
        if (!segment_collision_free(g, p, q))
            continue;
        const double len = distance(p, q);
        const int n = static_cast<int>(std::ceil(len / (g.resolution() / 2))) + 1;
        for (int k = 0; k <= n; ++k) {
            const double t = static_cast<double>(k) / n;
            ASSERT_TRUE(g.free_at({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)}));
        }
    }
}
