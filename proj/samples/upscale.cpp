// Minimal library usage: classify a screen image and upscale it with the
// content-adaptive SLI pipeline.
//
//   upscale_sample input.ppm output.ppm [factor]

#include <cstdlib>
#include <iostream>
#include <string>

#include <screenscale/screenscale.hpp>

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: " << argv[0] << " input.ppm output.ppm [factor]\n";
        return 2;
    }
    try {
        const screenscale::Raster input = screenscale::load_image(argv[1]);
        screenscale::ScaleJob job;
        job.factor = argc > 3 ? std::stod(argv[3]) : 1.5;

        const screenscale::ContentMap map = screenscale::classify(input, {});
        const screenscale::Raster output = screenscale::scale_adaptive(input, job, map);
        screenscale::save_image(output, argv[2]);

        std::cout << input.width() << "x" << input.height() << " -> " << output.width() << "x" << output.height()
                  << ", " << map.count(screenscale::ContentType::text) << " text / "
                  << map.count(screenscale::ContentType::pictorial) << " pictorial blocks, major "
                  << screenscale::to_string(map.major_type()) << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
