#pragma once

#include "fewsub/absorption.hpp"
#include "fewsub/affine_consistency.hpp"
#include "fewsub/affine_module.hpp"
#include "fewsub/algebra.hpp"
#include "fewsub/algebras.hpp"
#include "fewsub/benchmark.hpp"
#include "fewsub/binary_instance.hpp"
#include "fewsub/clone.hpp"
#include "fewsub/consistency.hpp"
#include "fewsub/csp.hpp"
#include "fewsub/element_set.hpp"
#include "fewsub/error.hpp"
#include "fewsub/io.hpp"
#include "fewsub/linear.hpp"
#include "fewsub/oracle.hpp"
#include "fewsub/polymorphism.hpp"
#include "fewsub/solver.hpp"
#include "fewsub/workspace.hpp"
