// Writes the reference inputs under data/: models, states and a counting query.

#include <cmath>
#include <filesystem>
#include <iostream>

#include "semigroup/demo.hpp"
#include "semigroup/io.hpp"

using namespace semigroup;

int main(int argc, char** argv)
{
    const std::filesystem::path dir = argc > 1 ? argv[1] : "data";
    std::filesystem::create_directories(dir);
    auto put = [&](const char* name, const Json& j) {
        write_text_file((dir / name).string(), j.dump(2) + "\n");
        std::cout << (dir / name).string() << "\n";
    };

    put("extract_demo.json", model_to_json(extract_demo_model(), kDemoBeta));
    put("demo_g0.1.json", model_to_json(demo_model(0.1), kDemoBeta));
    put("demo_g0.json", model_to_json(demo_model(0.0), kDemoBeta));

    Json plus = {{"ket", vector_to_json(Vector::Constant(2, cplx(1.0 / std::sqrt(2.0), 0.0)))}};
    put("state_plus.json", plus);
    Matrix ground = Matrix::Zero(2, 2);
    ground(0, 0) = 1.0;
    put("state_ground.json", state_to_json(ground));
    put("query_zero_events.json", Json{{"t1", 0.0}, {"t2", 1.0}, {"n_events", 0}, {"sigma", "all"}});
    put("query_one_event.json", Json{{"t1", 0.5}, {"t2", 2.0}, {"n_events", 1}, {"sigma", Json::array({0})}});
    return 0;
}
