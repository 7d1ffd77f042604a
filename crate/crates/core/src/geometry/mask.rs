//! Binary instance mask over a fixed-size pixel grid.

use crate::{Error, Result};

/// Per-pixel membership of one instance, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceMask {
    width: usize,
    height: usize,
    member: Vec<bool>,
}

impl InstanceMask {
    pub fn new(width: usize, height: usize, member: Vec<bool>) -> Result<Self> {
        if member.len() != width * height {
            return Err(Error::ShapeMismatch(format!(
                "mask data length {} != {width}x{height}",
                member.len()
            )));
        }
        Ok(Self {
            width,
            height,
            member,
        })
    }

    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            member: vec![false; width * height],
        }
    }

    /// Build from a membership predicate over `(x, y)`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut member = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                member.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            member,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.member[y * self.width + x]
    }

    /// Membership with out-of-range coordinates treated as background.
    #[inline]
    pub fn get_signed(&self, x: i64, y: i64) -> bool {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return false;
        }
        self.member[y as usize * self.width + x as usize]
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.member[y * self.width + x] = value;
    }

    pub fn pixels(&self) -> &[bool] {
        &self.member
    }

    /// Number of member pixels.
    pub fn area(&self) -> usize {
        self.member.iter().filter(|&&m| m).count()
    }

    pub fn same_size(&self, other: &InstanceMask) -> bool {
        self.width == other.width && self.height == other.height
    }
}
