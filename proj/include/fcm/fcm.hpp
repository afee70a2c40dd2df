#ifndef FCM_FCM_HPP
#define FCM_FCM_HPP

// Umbrella header for the fast concept mapping library.

#include "fcm/baseline.hpp"
#include "fcm/concept.hpp"
#include "fcm/dataset.hpp"
#include "fcm/encoding.hpp"
#include "fcm/error.hpp"
#include "fcm/evaluation.hpp"
#include "fcm/graph.hpp"
#include "fcm/io.hpp"
#include "fcm/random.hpp"
#include "fcm/serialize.hpp"
#include "fcm/synth.hpp"

#endif  // FCM_FCM_HPP
