# tests/helpers.py
from core_words import DirectiveSequence, Morphism, stationary_extension


def hat_base(size, length=2):
    """τ_0 giving every level-1 letter its own block of ``length`` letters."""
    images = [tuple(range(length * u + 1, length * (u + 1) + 1)) for u in range(size)]
    return Morphism.from_images(images, source_level=1, target_level=0)


def stationary_sequence(images, base_length=2, name=''):
    """Hat τ_0 followed by one morphism repeated at every level."""
    tau = Morphism.from_images(images, source_level=2, target_level=1, target_size=len(images))
    return DirectiveSequence((hat_base(len(images), base_length), tau), stationary_extension(tau), name)
