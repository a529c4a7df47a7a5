#pragma once

#include <cstddef>
#include <exception>
#include <string_view>
#include <vector>

namespace spectra {

/// Serial runs are the reference; parallel runs must reproduce them bit for
/// bit. Every kernel writes its result to a slot fixed by the input index.
enum class Execution { serial, parallel };

std::string_view to_string(Execution e);

/// Calls body(i) for i in [0, n). The first exception by index is rethrown
/// after the loop, whatever the schedule.
template <class Body>
void for_each_index(std::size_t n, Execution exec, Body&& body) {
    std::vector<std::exception_ptr> errors(n);
    const long count = static_cast<long>(n);
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (long i = 0; i < count; ++i) {
            try {
                body(static_cast<std::size_t>(i));
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    } else {
        for (long i = 0; i < count; ++i) {
            try {
                body(static_cast<std::size_t>(i));
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
                break;
            }
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

/// Sets the OpenMP thread count (n <= 0 keeps the runtime default).
void set_thread_count(int n);
int thread_count();

}  // namespace spectra
