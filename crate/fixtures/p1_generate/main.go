package main

//go:generate go run github.com/example/codegen/cmd/codegen@v1.12.4 -generate types -package codegen api/openapi.yaml

import "fmt"

// go:generate echo "not a directive: space after the slashes"

func main() {
	fmt.Println("generated code lives in codegen/")
}
