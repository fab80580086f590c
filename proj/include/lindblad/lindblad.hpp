#pragma once

#include "lindblad/channel.hpp"
#include "lindblad/duhamel.hpp"
#include "lindblad/errors.hpp"
#include "lindblad/linalg.hpp"
#include "lindblad/model.hpp"
#include "lindblad/model_file.hpp"
#include "lindblad/parallel.hpp"
#include "lindblad/pauli.hpp"
#include "lindblad/primitives.hpp"
#include "lindblad/quadrature.hpp"
#include "lindblad/random.hpp"
#include "lindblad/time_dependent.hpp"
