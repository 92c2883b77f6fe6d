// Writes a synthetic raw snapshot shaped like the US inputs, plus run specs
// for the three horizons, so the CLI can be tried end to end without the
// real data.
//
//   make_synthetic_data <output-dir> [seed]

#include "rfcast/synthetic.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: make_synthetic_data <output-dir> [seed]\n";
        return 2;
    }
    const std::filesystem::path dir(argv[1]);
    const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 7;
    const auto manifest = rfcast::synthetic::write_raw_snapshot(dir, seed);
    for (int h : {1, 3, 6}) {
        const auto path = dir / ("synthetic_h" + std::to_string(h) + ".runspec");
        std::ofstream rs(path, std::ios::binary);
        rs << "# Synthetic data; paper-style protocol.\n"
           << "manifest = " << manifest.filename().string() << "\n"
           << "model = rf\nhorizon = " << h << "\n"
           << "train_start = 1970Q2\nfirst_predict = 1990Q2\nlast_predict = 2016Q2\n"
           << "target = gdp_growth_third_estimate\n"
           << "features = tbill_3m,gov_bond_10y,equity_pct_change,debt_gdp_ratio\n"
           << "seed = 1\nn_trees = 100\n"
           << "predictions = synthetic_h" << h << ".csv\n"
           << "excerpt = 2008Q1:2009Q4\n"
           << "spf_h1 = spf_mean_h1\nspf_h3 = spf_mean_h3\n";
        std::cout << path.string() << '\n';
    }
    return 0;
}
