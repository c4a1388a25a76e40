package main

import "fmt"

// Add is implemented in add_amd64.s.
func Add(a, b int64) int64

func main() {
	fmt.Println(Add(1, 2))
}
