// Benchmark: serial vs OpenMP prediction over a generated corpus, with an
// equality check (the parallel path must be bit-identical to the serial one).

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cf/generator.hpp"
#include "cf/model.hpp"
#include "cf/parallel.hpp"

using namespace cf;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
    auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) fn();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
    int n_sentences = 4000;
    int reps = 3;
    if (argc > 1) n_sentences = std::atoi(argv[1]);
    if (argc > 2) reps = std::atoi(argv[2]);

    GeneratorConfig gc;
    gc.labels = {"NIL",      "Alpha:One", "Alpha:Two",  "Alpha:Three",
                 "Beta:One", "Beta:Two",  "Beta:Three"};
    gc.seed = 7;
    GeneratedCorpus corpus = generate_corpus(gc, n_sentences, 2);

    ModelConfig mc;
    mc.vocab_size = corpus.vocab.size();
    mc.num_labels = 7;
    mc.embed_dim = 50;
    mc.hidden_dim = 100;
    mc.window = 2;
    mc.seed = 7;
    ModelParams params = ModelParams::init(mc);

    std::printf("instances: %zu  embed %d  hidden %d\n", corpus.instances.size(),
                mc.embed_dim, mc.hidden_dim);

    std::vector<int> serial = predict_labels_serial(params, corpus.instances);
    double t_serial = time_ms(
        [&] { serial = predict_labels_serial(params, corpus.instances); }, reps);

#ifdef _OPENMP
    int max_threads = omp_get_max_threads();
#else
    int max_threads = 1;
#endif
    std::printf("%8s %12s %10s %8s\n", "threads", "time_ms", "speedup", "equal");
    std::printf("%8d %12.2f %10s %8s\n", 1, t_serial, "1.00x", "ref");
    bool all_equal = true;
    for (int t = 2; t <= max_threads; t *= 2) {
        std::vector<int> par;
        double t_par =
            time_ms([&] { par = predict_labels(params, corpus.instances, t); }, reps);
        bool equal = par == serial;
        all_equal = all_equal && equal;
        std::printf("%8d %12.2f %9.2fx %8s\n", t, t_par, t_serial / t_par,
                    equal ? "yes" : "NO");
    }
    if (!all_equal) {
        std::printf("FAIL: parallel predictions diverged from serial\n");
        return 1;
    }
    std::printf("parallel output identical to serial reference\n");
    return 0;
}
